/* Copyright 2026 The symspot Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "symspot/anchors.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "symspot/error.hpp"
#include "symspot/json_io.hpp"
#include "symspot/random.hpp"

namespace symspot {
namespace {

double distance(const BoxSize& a, const BoxSize& b) {
  return 1.0 - centered_iou(a, b);
}

std::size_t nearest(const BoxSize& s, const std::vector<BoxSize>& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = distance(s, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

struct WeightedSize {
  BoxSize size;
  double count;
};

// k-means++ over the distinct sizes, each weighted by its multiplicity, so
// the seeding only depends on the multiset of inputs.
std::vector<BoxSize> seed_centroids(const std::vector<WeightedSize>& points,
                                    int k, Rng& rng) {
  std::vector<BoxSize> centroids;
  std::vector<double> d2(points.size(), 1.0);
  std::vector<bool> taken(points.size(), false);
  for (int c = 0; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!taken[i]) total += points[i].count * d2[i];
    }
    std::size_t pick = points.size();
    if (total > 0.0) {
      double r = rng.uniform() * total;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (taken[i]) continue;
        r -= points[i].count * d2[i];
        if (r < 0.0) {
          pick = i;
          break;
        }
      }
    }
    // Rounding may exhaust the loop; fall back to the last eligible point.
    if (pick == points.size()) {
      for (std::size_t i = points.size(); i-- > 0;) {
        if (!taken[i]) {
          pick = i;
          break;
        }
      }
    }
    taken[pick] = true;
    centroids.push_back(points[pick].size);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = distance(points[i].size, points[pick].size);
      d2[i] = std::min(c == 0 ? d * d : d2[i], d * d);
    }
  }
  return centroids;
}

}  // namespace

double centered_iou(const BoxSize& a, const BoxSize& b) {
  const double inter = std::min(a.w, b.w) * std::min(a.h, b.h);
  return inter / (a.w * a.h + b.w * b.h - inter);
}

double mean_distortion(std::span<const BoxSize> sizes, const AnchorSet& anchors) {
  double sum = 0.0;
  for (const auto& s : sizes) {
    sum += distance(s, anchors.priors[nearest(s, anchors.priors)]);
  }
  return sizes.empty() ? 0.0 : sum / static_cast<double>(sizes.size());
}

AnchorClustering cluster_anchors_traced(std::span<const BoxSize> sizes, int k,
                                        std::uint64_t seed, int max_iters) {
  if (sizes.empty()) throw InvalidInput("anchor clustering: no box sizes given");
  if (k < 1) throw InvalidInput("anchor clustering: k must be at least 1");
  std::map<BoxSize, double> multiplicity;
  for (const auto& s : sizes) {
    if (!(s.w > 0.0 && s.h > 0.0)) {
      throw InvalidInput("anchor clustering: box sizes must be positive");
    }
    multiplicity[s] += 1.0;
  }
  if (static_cast<std::size_t>(k) > multiplicity.size()) {
    throw InvalidInput("anchor clustering: k = " + std::to_string(k) +
                       " exceeds the " + std::to_string(multiplicity.size()) +
                       " distinct sizes");
  }

  // Lloyd iterations run on the distinct sizes with multiplicities, which is
  // equivalent to running on the full list and independent of input order.
  std::vector<WeightedSize> points;
  for (const auto& [s, n] : multiplicity) points.push_back({s, n});
  const double total = static_cast<double>(sizes.size());

  Rng rng(seed);
  std::vector<BoxSize> centroids = seed_centroids(points, k, rng);
  std::vector<std::size_t> assign(points.size(), k);

  AnchorClustering result;
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::size_t c = nearest(points[i].size, centroids);
      if (c != assign[i]) changed = true;
      assign[i] = c;
      sum += points[i].count * distance(points[i].size, centroids[c]);
    }
    result.distortion.push_back(sum / total);
    result.iterations = iter + 1;
    if (!changed) break;

    // Mean update, kept only when it does not raise the cluster's distortion:
    // the arithmetic mean is not the minimiser of 1 - IoU.
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      double n = 0.0, sw = 0.0, sh = 0.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (assign[i] != c) continue;
        n += points[i].count;
        sw += points[i].count * points[i].size.w;
        sh += points[i].count * points[i].size.h;
      }
      if (n == 0.0) continue;
      const BoxSize mean{sw / n, sh / n};
      double before = 0.0, after = 0.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (assign[i] != c) continue;
        before += points[i].count * distance(points[i].size, centroids[c]);
        after += points[i].count * distance(points[i].size, mean);
      }
      if (after <= before) centroids[c] = mean;
    }
  }

  std::sort(centroids.begin(), centroids.end(),
            [](const BoxSize& a, const BoxSize& b) {
              const double aa = a.w * a.h, ab = b.w * b.h;
              return aa != ab ? aa < ab : a < b;
            });
  result.anchors.priors = std::move(centroids);
  return result;
}

AnchorSet cluster_anchors(std::span<const BoxSize> sizes, int k,
                          std::uint64_t seed, int max_iters) {
  return cluster_anchors_traced(sizes, k, seed, max_iters).anchors;
}

void save_anchors(const std::filesystem::path& path, const AnchorSet& anchors) {
  Json doc = Json::array();
  for (const auto& p : anchors.priors) {
    doc.push_back({round_significant(p.w), round_significant(p.h)});
  }
  write_json(path, doc);
}

AnchorSet load_anchors(const std::filesystem::path& path) {
  const Json doc = read_json(path);
  AnchorSet set;
  try {
    for (const auto& pair : doc) {
      const BoxSize s{pair.at(0).get<double>(), pair.at(1).get<double>()};
      if (!(s.w > 0.0 && s.h > 0.0) || pair.size() != 2) {
        throw FormatError("anchor sizes must be positive [w, h] pairs");
      }
      set.priors.push_back(s);
    }
  } catch (const Json::exception& e) {
    throw FormatError("malformed anchor file " + path.string() + ": " + e.what());
  }
  if (set.priors.empty()) throw FormatError("empty anchor file " + path.string());
  return set;
}

}  // namespace symspot
