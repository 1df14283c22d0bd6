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

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cvwitness/bounds.hpp"
#include "cvwitness/partitions.hpp"
#include "cvwitness/states.hpp"

namespace cvwitness {

/// Component sampler for the random rank-one search.
enum class Distribution { kNormal, kUniform };

struct SearchConfig {
  std::int64_t trials = 1'000'000;
  std::uint64_t seed = 0;
  /// Safety multiplier: certification requires B_I - G > s_level * sigma.
  double s_level = 6.0;
  /// Normalization tr(X gxx) + tr(P gpp) = C for the gradient searches.
  double C = 1.0;
  Distribution distribution = Distribution::kNormal;
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  int threads = 0;

  /// Gradient searches: iterations per start and restarts after a conflict.
  int max_iterations = 2000;
  int restarts = 200;
  /// Score the descent by raw margin B_I - G (sigma ignored).
  bool ignore_sigma = false;
  /// Optional starting pair for the gradient searches.
  std::optional<WitnessPair> start;
  AscentOptions ascent;

  /// Called with (restart, iteration, current minimum score) from the
  /// orchestrating thread only.
  std::function<void(int, int, double)> progress;
};

struct ViolationReport {
  Partition partition;
  double G = 0.0;
  double sigma = 0.0;
  double bound = 0.0;
  /// bound - G; positive means the witness detects the partition at s = 0.
  double margin = 0.0;
  /// (bound - G) / sigma and 1 - erf(s / sqrt 2); absent when sigma == 0.
  std::optional<double> s;
  std::optional<double> confidence;
  WitnessPair witness;
  BoundResult certificate;
  /// Generating vectors when the witness is rank one (random search).
  std::vector<double> h;
  std::vector<double> g;
  /// False when an inner ascent or the outer optimizer hit its budget.
  bool converged = true;
};

/// sigma(X, P) = sqrt(sum_{i,j} x_ij^2 sxx_ij^2 + p_ij^2 spp_ij^2) over all
/// ordered index pairs. Throws MissingErrorModel without sigma blocks.
double measurement_sigma(const WitnessPair& w, const CVState& s);

/// E_I = G + s_level * sigma - B_I; negative certifies non-I-separability.
double condition_E(const WitnessPair& w, const CVState& s, const Partition& p,
                   double s_level, const AscentOptions& opts = {});

/// Full report for one partition. Throws ZeroSigmaError when sigma == 0.
ViolationReport violation_score(const WitnessPair& w, const CVState& s,
                                const Partition& p,
                                const AscentOptions& opts = {});

/// Same report without the sigma requirement: s and confidence are filled
/// only when an error model is present and sigma > 0.
ViolationReport evaluate_report(const WitnessPair& w, const CVState& s,
                                const Partition& p,
                                const AscentOptions& opts = {});

/// 1 - erf(s / sqrt 2). Negative s is clamped to 1 with a warning.
double confidence(double s);

/// Best of cfg.trials i.i.d. rank-one pairs X = h h^T, P = g g^T, scored by
/// violation score. Each trial draws from its own stream keyed by
/// (seed, trial index) and ties go to the lowest index, so the result does
/// not depend on cfg.threads.
ViolationReport random_rank_one_search(const CVState& s, const Partition& p,
                                       const SearchConfig& cfg);

/// Minimizes s_level * sigma - B_I over PSD pairs with
/// tr(X gxx) + tr(P gpp) = C. The state is certified at s_level when the
/// objective drops below -C.
struct OptimizeResult {
  ViolationReport report;
  double objective = 0.0;
  bool certified = false;
  int iterations = 0;
  bool converged = false;
};
OptimizeResult optimize_witness(const CVState& s, const Partition& p,
                                const SearchConfig& cfg);

struct GenuineResult {
  bool found = false;
  WitnessPair witness;
  /// One report per bipartition, in bipartitions(n) order.
  std::vector<ViolationReport> reports;
  double min_s = 0.0;
  int restarts = 0;
  int iterations = 0;
};

/// Looks for one pair violating every bipartition bound at level
/// cfg.s_level simultaneously, which certifies genuine multipartite
/// entanglement.
GenuineResult genuine_search(const CVState& s, const SearchConfig& cfg);

/// Worker count actually used for cfg.threads.
int resolve_threads(int requested);

}  // namespace cvwitness
