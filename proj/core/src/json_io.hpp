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

// JSON helpers shared by the state, witness and report writers. Internal.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvwitness/error.hpp"
#include "cvwitness/linalg.hpp"

namespace cvwitness::detail {

using json = nlohmann::json;

inline constexpr double kLoadAsymmetryTolerance = 1e-8;

/// Reads doc[key] as an n x n numeric matrix; rejects ragged rows,
/// non-numbers and asymmetry above kLoadAsymmetryTolerance.
inline SymMatrix read_json_matrix(const json& doc, const char* key, int n,
                                  const char* what) {
  const json& m = doc.at(key);
  if (!m.is_array() || static_cast<int>(m.size()) != n) {
    std::ostringstream os;
    os << what << ": '" << key << "' must be an array of " << n << " rows, got "
       << (m.is_array() ? std::to_string(m.size()) + " rows" : m.type_name());
    throw LoadError(os.str());
  }
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const json& row = m[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      std::ostringstream os;
      os << what << ": '" << key << "' row " << i + 1 << " must have " << n
         << " entries";
      throw LoadError(os.str());
    }
    for (const json& v : row) {
      if (!v.is_number()) {
        std::ostringstream os;
        os << what << ": '" << key << "' row " << i + 1
           << " contains a non-number";
        throw LoadError(os.str());
      }
      rows[static_cast<std::size_t>(i)].push_back(v.get<double>());
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = std::abs(rows[i][j] - rows[j][i]);
      if (d > kLoadAsymmetryTolerance) {
        std::ostringstream os;
        os << what << ": '" << key << "' is not symmetric at (" << i + 1
           << "," << j + 1 << "): |difference| = " << d;
        throw LoadError(os.str());
      }
    }
  }
  return SymMatrix::from_rows(rows);
}

/// %.17g: enough digits for an exact round trip of every double.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Row-major nested array, one row per line, indented by `indent` spaces.
inline void write_json_matrix(std::ostream& os, const SymMatrix& m,
                              int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  os << "[";
  for (int i = 0; i < m.dim(); ++i) {
    os << (i ? ",\n" : "\n") << pad << "[";
    for (int j = 0; j < m.dim(); ++j)
      os << (j ? ", " : "") << format_number(m(i, j));
    os << "]";
  }
  os << "\n" << std::string(static_cast<std::size_t>(indent), ' ') << "]";
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write '" + path + "'");
  out << text;
}

}  // namespace cvwitness::detail
