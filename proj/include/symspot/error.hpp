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

#pragma once

#include <stdexcept>
#include <string>

namespace symspot {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller passed a value outside an operation's domain.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Filesystem read/write failure; the message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

// A file was readable but its content does not follow the expected layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

// Two detections claim the same (cell, anchor) slot of a prediction grid.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// The synthetic plan generator could not place a symbol.
class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace symspot
