// Copyright 2026 The cvwitness Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

namespace cvwitness::cli {

enum class Relation { kNear, kAtLeast, kTrue };

struct Check {
  std::string name;
  double computed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::kNear;

  bool pass() const;
};

std::vector<std::string> reproduce_targets();

/// Recomputes one published result. Throws std::invalid_argument for an
/// unknown target.
std::vector<Check> reproduce(const std::string& target);

}  // namespace cvwitness::cli
