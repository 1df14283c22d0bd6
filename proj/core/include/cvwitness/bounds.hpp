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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvwitness/linalg.hpp"
#include "cvwitness/partitions.hpp"
#include "cvwitness/states.hpp"

namespace cvwitness {

/// The matrices X and P defining G = tr(X gamma_xx) + tr(P gamma_pp).
struct WitnessPair {
  SymMatrix x;
  SymMatrix p;

  int modes() const { return x.dim(); }
};

/// Checks both matrices are PSD (within kPsdTolerance) and of equal size.
WitnessPair make_witness(SymMatrix x, SymMatrix p);

/// Witness file: {"n": int, "X": [[...]], "P": [[...]]}.
WitnessPair parse_witness(std::string_view json_text);
WitnessPair load_witness(const std::string& path);
std::string witness_to_json(const WitnessPair& w);

/// Built-in witnesses: "klev4-genuine" (violates every bipartition bound of
/// klev4 by more than 4.4 standard deviations) and "ppt4-12-34" (detects the
/// 12|34 entanglement of ppt4).
WitnessPair builtin_witness(std::string_view name);
std::vector<std::string> builtin_witness_names();

/// Builtin name or JSON file path.
WitnessPair resolve_witness(const std::string& source);

/// The ppt4 detector family: X couples modes (1,3) and (2,4) through
/// -+sqrt(xy), P couples (1,4) and (2,3) through sqrt(pq).
WitnessPair ppt_witness(double x, double y, double p, double q);

/// Controls for the inner concave maximization over the freed entries.
struct AscentOptions {
  int max_iterations = 10000;
  double gradient_tolerance = 1e-9;
  /// Stop once the relative gain stays below this for `stall_window`
  /// consecutive iterations.
  double relative_tolerance = 1e-12;
  int stall_window = 5;
  double initial_step = 1.0;
  /// Optional warm start: entries on the free mask are taken from these.
  const WitnessPair* warm_start = nullptr;
};

struct BoundResult {
  double value = 0.0;
  /// The maximizing pair (X_u, P_v): equal to the input off the free mask.
  SymMatrix certificate_x;
  SymMatrix certificate_p;
  int iterations = 0;
  bool converged = false;
};

/// G = tr(X gamma_xx) + tr(P gamma_pp).
double evaluate_G(const WitnessPair& w, const CVState& s);

/// Separability bound B_I(X, P): the maximum of quantum_bound over every
/// replacement of the cross-block entries of X and P that keeps both PD.
/// Violating G >= B_I certifies the state is not I-separable.
///
/// The objective is jointly concave in the freed entries, so the
/// projected-gradient ascent used here finds the global maximum; suprema
/// on the PSD boundary are approached from the interior.
BoundResult separability_bound(const WitnessPair& w, const Partition& p,
                               const AscentOptions& opts = {});

/// Closed form for rank-one X = h h^T, P = g g^T: the sum over blocks of
/// |sum_{i in block} h_i g_i|. Attained by flipping signs block-wise.
double rank_one_bound(std::span<const double> h, std::span<const double> g,
                      const Partition& p);

/// The block-wise sign-flipped rank-one pair realizing rank_one_bound.
WitnessPair rank_one_certificate(std::span<const double> h,
                                 std::span<const double> g, const Partition& p);

struct LmiResult {
  bool violated = false;
  double min_eigenvalue = 0.0;
  /// Diagonal of E_I for the worst pattern, +-1 per mode, block 1 fixed +1.
  std::vector<int> worst_signs;
};

/// Rank-one separability test in matrix form: [[gxx, E/2], [E/2, gpp]] >= 0
/// for every diagonal sign matrix E constant on blocks.
LmiResult lmi_separability_test(const CVState& s, const Partition& p);

/// Single-inequality genuine multipartite bound for the symmetric witness:
/// (n-1) sqrt(n(n-2)) + 4(n-1) / (sqrt(n)(sqrt(2n-2) + sqrt(n-2))), n >= 3.
double analytic_biseparable_bound(int n);

/// X_n = (n-2) 1 + ones, P_n = n 1 - ones: the witness of
/// sum_{i<j} <(x_i + x_j)^2 + (p_i - p_j)^2>.
WitnessPair symmetric_witness(int n);

struct Table1Row {
  int n = 0;
  double q = 0.0;               // quantumness bound (n-1) sqrt(n(n-2))
  std::optional<double> a;      // analytic biseparable bound, n >= 3
  std::optional<double> b;      // numerical biseparable bound, n >= 3
  double f = 0.0;               // full separability bound
  bool converged = true;        // all ascents converged
};

/// Lower bounds on G_n for quantum, biseparable and fully separable states.
Table1Row table1_bounds(int n, const AscentOptions& opts = {});

}  // namespace cvwitness
