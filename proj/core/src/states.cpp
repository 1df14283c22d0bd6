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

#include "cvwitness/states.hpp"

#include <sstream>

#include "cvwitness/error.hpp"
#include "json_io.hpp"

namespace cvwitness {

using detail::json;

CVState make_state(SymMatrix gamma_xx, SymMatrix gamma_pp,
                   std::optional<SymMatrix> sigma_xx,
                   std::optional<SymMatrix> sigma_pp, std::string label) {
  const int n = gamma_xx.dim();
  auto check_dim = [n](const SymMatrix& m, const char* name) {
    if (m.dim() != n) {
      std::ostringstream os;
      os << "state: " << name << " is " << m.dim() << "x" << m.dim()
         << " but gamma_xx is " << n << "x" << n;
      throw LoadError(os.str());
    }
  };
  check_dim(gamma_pp, "gamma_pp");
  if (sigma_xx.has_value() != sigma_pp.has_value())
    throw LoadError("state: sigma_xx and sigma_pp must be given together");
  for (const auto* sig : {&sigma_xx, &sigma_pp}) {
    if (!sig->has_value()) continue;
    check_dim(**sig, sig == &sigma_xx ? "sigma_xx" : "sigma_pp");
    if ((*sig)->matrix().minCoeff() < 0.0) {
      throw LoadError(std::string("state: negative standard deviation in ") +
                      (sig == &sigma_xx ? "sigma_xx" : "sigma_pp"));
    }
  }
  CVState s;
  s.n = n;
  s.gamma_xx = std::move(gamma_xx);
  s.gamma_pp = std::move(gamma_pp);
  s.sigma_xx = std::move(sigma_xx);
  s.sigma_pp = std::move(sigma_pp);
  s.label = std::move(label);
  return s;
}

CVState parse_state(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw LoadError(std::string("state: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw LoadError("state: top level must be an object");
  try {
    if (!doc.contains("gamma_xx") || !doc.contains("gamma_pp"))
      throw LoadError("state: 'gamma_xx' and 'gamma_pp' are required");
    const int n = doc.contains("n") ? doc.at("n").get<int>()
                                    : static_cast<int>(doc.at("gamma_xx").size());
    if (n < 1 || n > 32) {
      throw LoadError("state: n=" + std::to_string(n) + " outside [1, 32]");
    }
    auto matrix = [&](const char* key) {
      return detail::read_json_matrix(doc, key, n, "state");
    };
    std::optional<SymMatrix> sxx, spp;
    if (doc.contains("sigma_xx")) sxx = matrix("sigma_xx");
    if (doc.contains("sigma_pp")) spp = matrix("sigma_pp");
    std::string label = doc.value("label", std::string());
    return make_state(matrix("gamma_xx"), matrix("gamma_pp"), std::move(sxx),
                      std::move(spp), std::move(label));
  } catch (const json::exception& e) {
    throw LoadError(std::string("state: ") + e.what());
  } catch (const DimensionError& e) {
    throw LoadError(std::string("state: ") + e.what());
  }
}

CVState load_state(const std::string& path) {
  try {
    return parse_state(detail::read_text_file(path));
  } catch (const LoadError& e) {
    throw LoadError(path + ": " + e.what());
  }
}

std::string state_to_json(const CVState& s) {
  std::ostringstream os;
  os << "{\n  \"n\": " << s.n << ",\n";
  if (!s.label.empty()) os << "  \"label\": " << json(s.label).dump() << ",\n";
  os << "  \"gamma_xx\": ";
  detail::write_json_matrix(os, s.gamma_xx, 2);
  os << ",\n  \"gamma_pp\": ";
  detail::write_json_matrix(os, s.gamma_pp, 2);
  if (s.has_error_model()) {
    os << ",\n  \"sigma_xx\": ";
    detail::write_json_matrix(os, *s.sigma_xx, 2);
    os << ",\n  \"sigma_pp\": ";
    detail::write_json_matrix(os, *s.sigma_pp, 2);
  }
  os << "\n}\n";
  return os.str();
}

void save_state(const CVState& s, const std::string& path) {
  detail::write_text_file(path, state_to_json(s));
}

Physicality is_physical(const CVState& s) {
  const double lo = symplectic_spectrum(s.covariance()).min();
  return {lo >= 0.5 - kPhysicalityTolerance, lo};
}

CVState partial_transpose(const CVState& s, const std::vector<int>& modes) {
  Eigen::VectorXd signs = Eigen::VectorXd::Ones(s.n);
  for (int m : modes) {
    if (m < 0 || m >= s.n) {
      std::ostringstream os;
      os << "partial_transpose: mode " << m + 1 << " out of range 1.." << s.n;
      throw DimensionError(os.str());
    }
    signs(m) = -1.0;
  }
  CVState out = s;
  // Sign flips are exact in floating point, so the map is an involution.
  out.gamma_pp = SymMatrix(signs.asDiagonal() * s.gamma_pp.matrix() *
                           signs.asDiagonal());
  return out;
}

CVState builtin_state(std::string_view name) {
  if (name == "ppt4") {
    // Bound-entangled four-mode state: every (1,3) partial transpose is
    // negative, every (2,2) one positive.
    SymMatrix gxx{{2, 0, 1, 0}, {0, 2, 0, -1}, {1, 0, 2, 0}, {0, -1, 0, 2}};
    SymMatrix gpp{{1, 0, 0, -1}, {0, 1, -1, 0}, {0, -1, 4, 0}, {-1, 0, 0, 4}};
    return make_state(0.5 * gxx, 0.5 * gpp, std::nullopt, std::nullopt,
                      "ppt4");
  }
  if (name == "klev4") {
    SymMatrix gxx{{1.09921, 0.16092, -0.17609, -0.84831},
                  {0.16092, 0.40938, -0.16060, -0.18963},
                  {-0.17609, -0.16060, 0.46060, 0.04319},
                  {-0.84831, -0.18963, 0.04319, 1.06419}};
    SymMatrix gpp{{1.09921, 0.35533, 0.36439, 0.91386},
                  {0.35533, 0.92282, 0.57440, 0.43388},
                  {0.36439, 0.57440, 1.04339, 0.34868},
                  {0.91386, 0.43388, 0.34868, 1.06419}};
    SymMatrix sxx{{0.00327, 0.01041, 0.00894, 0.00647},
                  {0.01041, 0.00822, 0.01848, 0.01899},
                  {0.00894, 0.01848, 0.00861, 0.01345},
                  {0.00647, 0.01899, 0.01345, 0.00549}};
    SymMatrix spp{{0.00458, 0.01009, 0.02767, 0.04289},
                  {0.01009, 0.01023, 0.02101, 0.02085},
                  {0.02767, 0.02101, 0.01466, 0.01955},
                  {0.04289, 0.02085, 0.01955, 0.00455}};
    return make_state(gxx, gpp, sxx, spp, "klev4");
  }
  if (name == "vacuum4") {
    return make_state(0.5 * SymMatrix::identity(4), 0.5 * SymMatrix::identity(4),
                      SymMatrix::constant(4, 0.01), SymMatrix::constant(4, 0.01),
                      "vacuum4");
  }
  std::ostringstream os;
  os << "unknown builtin state '" << name << "' (known:";
  for (const auto& n : builtin_state_names()) os << ' ' << n;
  os << ")";
  throw LoadError(os.str());
}

std::vector<std::string> builtin_state_names() {
  return {"ppt4", "klev4", "vacuum4"};
}

CVState resolve_state(const std::string& source) {
  for (const auto& name : builtin_state_names())
    if (source == name) return builtin_state(name);
  CVState s = load_state(source);
  if (s.label.empty()) s.label = source;
  return s;
}

}  // namespace cvwitness
