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

#include "cvwitness/witness.hpp"

namespace cvwitness {

/// JSON object for one report. Matrices are row-major nested arrays.
std::string report_to_json(const ViolationReport& r, int indent = 2);

/// JSON array of reports.
std::string reports_to_json(const std::vector<ViolationReport>& reports,
                            int indent = 2);

std::string genuine_to_json(const GenuineResult& g, int indent = 2);

/// Aligned plain-text table, five decimals: partition, G, sigma, B_I,
/// margin, s, P(s), and the generating vectors for rank-one witnesses.
std::string format_report_table(const std::vector<ViolationReport>& reports);

}  // namespace cvwitness
