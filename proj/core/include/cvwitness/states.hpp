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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvwitness/linalg.hpp"

namespace cvwitness {

/// An n-mode continuous-variable state described by the diagonal blocks of
/// its covariance matrix (no x-p correlations), with optional per-entry
/// standard deviations of the measured second moments.
struct CVState {
  int n = 0;
  SymMatrix gamma_xx;
  SymMatrix gamma_pp;
  std::optional<SymMatrix> sigma_xx;
  std::optional<SymMatrix> sigma_pp;
  std::string label;

  bool has_error_model() const { return sigma_xx && sigma_pp; }
  /// diag(gamma_xx, gamma_pp), the full 2n x 2n covariance matrix.
  SymMatrix covariance() const { return block_diagonal(gamma_xx, gamma_pp); }
};

/// Validates dimensions, symmetry and non-negative sigmas and builds the
/// state. Throws LoadError.
CVState make_state(SymMatrix gamma_xx, SymMatrix gamma_pp,
                   std::optional<SymMatrix> sigma_xx = std::nullopt,
                   std::optional<SymMatrix> sigma_pp = std::nullopt,
                   std::string label = {});

/// Parses the JSON state document:
///   {"n": 4, "gamma_xx": [[...]], "gamma_pp": [[...]],
///    "sigma_xx": [[...]], "sigma_pp": [[...]], "label": "..."}
/// sigma_* are optional but must appear together. Rows are mode-ordered
/// (row i is mode i+1). Matrices asymmetric by more than 1e-8 are rejected;
/// smaller asymmetry is symmetrized away.
CVState parse_state(std::string_view json_text);
CVState load_state(const std::string& path);

/// JSON text of the state with 17 significant digits per entry; parsing it
/// back gives bit-identical matrices.
std::string state_to_json(const CVState& s);
void save_state(const CVState& s, const std::string& path);

struct Physicality {
  bool physical;
  double min_symplectic_eigenvalue;
};

/// Tolerance below 1/2 still accepted as physical (printed data is rounded).
inline constexpr double kPhysicalityTolerance = 1e-9;

/// gamma + (i/2) J >= 0, tested as: every symplectic eigenvalue >= 1/2.
Physicality is_physical(const CVState& s);

/// Partial transposition on `modes` (0-based): momentum sign flip, i.e.
/// gamma_pp conjugated by diag(+-1). Applying it twice restores the state.
CVState partial_transpose(const CVState& s, const std::vector<int>& modes);

/// Built-in states: "ppt4" (bound-entangled PPT example), "klev4" (measured
/// four-mode cluster-type state with its error model), "vacuum4" (negative
/// control, uniform sigma 0.01).
CVState builtin_state(std::string_view name);
std::vector<std::string> builtin_state_names();

/// Builtin name or JSON file path.
CVState resolve_state(const std::string& source);

}  // namespace cvwitness
