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


#include "cvwitness/witness.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "gtest/gtest.h"

#include "cvwitness/error.hpp"
#include "cvwitness/log.hpp"
#include "test_support.hpp"

using namespace cvwitness;
using cvwitness::testing::random_psd;

namespace {

Partition bip(const char* text) { return parse_partition(text, 4); }

SearchConfig quick_config() {
  SearchConfig cfg;
  cfg.trials = 2000;
  cfg.seed = 99;
  cfg.threads = 1;
  return cfg;
}

bool is_psd(const SymMatrix& m) { return min_eigenvalue(m) >= -1e-10; }

}  // namespace

TEST(witness, sigma_genuine_example) {
  EXPECT_NEAR(measurement_sigma(builtin_witness("klev4-genuine"), builtin_state("klev4")),
              0.01947, 1e-4);
}

TEST(witness, sigma_simple_cases) {
  const CVState quiet = make_state(SymMatrix::identity(3), SymMatrix::identity(3),
                                   SymMatrix::zero(3), SymMatrix::zero(3));
  const WitnessPair w{SymMatrix::constant(3, 2.0), SymMatrix::identity(3)};
  EXPECT_EQ(measurement_sigma(w, quiet), 0.0);

  const CVState ones = make_state(SymMatrix::identity(3), SymMatrix::identity(3),
                                  SymMatrix::constant(3, 1.0), SymMatrix::constant(3, 1.0));
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
  e1[0] = 1.0;
  EXPECT_NEAR(measurement_sigma({SymMatrix::outer(e1), SymMatrix::zero(3)}, ones), 1.0, 1e-15);

  // Off-diagonal entries count twice: both (i, j) and (j, i).
  const WitnessPair off{SymMatrix{{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}, SymMatrix::zero(3)};
  EXPECT_NEAR(measurement_sigma(off, ones), std::sqrt(2.0), 1e-15);
}

TEST(witness, sigma_requires_error_model) {
  EXPECT_THROW(measurement_sigma(builtin_witness("ppt4-12-34"), builtin_state("ppt4")),
               MissingErrorModel);
}

TEST(witness, condition_E_examples) {
  const CVState s = builtin_state("klev4");
  const WitnessPair w = builtin_witness("klev4-genuine");
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const WitnessPair r{random_psd(rng, 4, 1 + trial % 4), random_psd(rng, 4, 4)};
    EXPECT_GE(condition_E(r, s, Partition::trivial(4), 0.0), -1e-9);
  }
  EXPECT_NEAR(condition_E(w, s, bip("14|23"), 4.43199), 0.0, 1e-3);
  EXPECT_NEAR(condition_E(w, s, bip("14|23"), 0.0), -(1.56114 - 1.47484), 1e-3);
}

TEST(witness, genuine_example_minimum_score) {
  const CVState s = builtin_state("klev4");
  const WitnessPair w = builtin_witness("klev4-genuine");
  double min_s = std::numeric_limits<double>::infinity();
  for (const auto& p : bipartitions(4)) {
    const ViolationReport r = violation_score(w, s, p);
    ASSERT_TRUE(r.s.has_value());
    EXPECT_NEAR(*r.s, (r.bound - r.G) / r.sigma, 1e-12);
    EXPECT_NEAR(*r.confidence, std::erfc(*r.s / std::sqrt(2.0)), 1e-15);
    EXPECT_NEAR(r.margin, r.bound - r.G, 1e-15);
    min_s = std::min(min_s, *r.s);
  }
  EXPECT_NEAR(min_s, 4.43199, 0.01);
}

TEST(witness, printed_vectors_score) {
  const std::vector<double> h = {1.97, -0.01, 0.49, 1.88}, g = {1.14, 0.18, -0.20, -1.03};
  Eigen::Map<const Eigen::VectorXd> hv(h.data(), 4), gv(g.data(), 4);
  const ViolationReport r = violation_score({SymMatrix::outer(hv), SymMatrix::outer(gv)},
                                            builtin_state("klev4"), bip("1|234"));
  EXPECT_NEAR(*r.s, 26.48, 2.0);
}

TEST(witness, no_violation_gives_negative_score) {
  const WitnessPair w{SymMatrix::identity(4), SymMatrix::identity(4)};
  const ViolationReport r = violation_score(w, builtin_state("klev4"), bip("12|34"));
  EXPECT_LT(*r.s, 0.0);
}

TEST(witness, zero_sigma_rejected) {
  const CVState quiet = make_state(SymMatrix::identity(2), SymMatrix::identity(2),
                                   SymMatrix::zero(2), SymMatrix::zero(2));
  const WitnessPair w{SymMatrix::identity(2), SymMatrix::identity(2)};
  EXPECT_THROW(violation_score(w, quiet, Partition::full(2)), ZeroSigmaError);
  const ViolationReport r = evaluate_report(w, quiet, Partition::full(2));
  EXPECT_FALSE(r.s.has_value());
  EXPECT_NEAR(r.bound, 2.0, 1e-9);
}

TEST(witness, evaluate_report_without_error_model) {
  const ViolationReport r =
      evaluate_report(builtin_witness("ppt4-12-34"), builtin_state("ppt4"), bip("12|34"));
  EXPECT_FALSE(r.s.has_value());
  EXPECT_GT(r.margin, 0.0);
}

TEST(witness, confidence_values) {
  EXPECT_EQ(confidence(0.0), 1.0);
  EXPECT_NEAR(confidence(1.1), 0.27, 0.01);
  EXPECT_NEAR(confidence(3.15), 1.6e-3, 1e-4);
  EXPECT_GE(confidence(3.0), 1e-3);
  EXPECT_LE(confidence(3.0), 5e-3);
  EXPECT_GE(confidence(5.0), 1e-7);
  EXPECT_LE(confidence(5.0), 1e-5);
  EXPECT_LE(confidence(6.0), 1e-8);
  for (double s = 0.0; s < 10.0; s += 0.25) EXPECT_GT(confidence(s), confidence(s + 0.25));
}

TEST(witness, confidence_negative_warns) {
  std::string seen;
  const WarningHandler previous = set_warning_handler([&](std::string_view m) { seen = m; });
  EXPECT_EQ(confidence(-0.5), 1.0);
  set_warning_handler(previous);
  EXPECT_FALSE(seen.empty());
}

TEST(witness, score_decreases_with_sigma) {
  const CVState base = builtin_state("klev4");
  const WitnessPair w = builtin_witness("klev4-genuine");
  const double s0 = *violation_score(w, base, bip("12|34")).s;
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      SymMatrix sxx = *base.sigma_xx;
      sxx.set(i, j, sxx(i, j) + 0.01);
      const CVState noisier =
          make_state(base.gamma_xx, base.gamma_pp, sxx, *base.sigma_pp, base.label);
      ASSERT_NE(w.x(i, j), 0.0);
      EXPECT_LT(*violation_score(w, noisier, bip("12|34")).s, s0);
    }
  }
}

TEST(witness, E_is_convex) {
  const CVState s = builtin_state("klev4");
  std::mt19937_64 rng(67);
  const auto bi = bipartitions(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Partition& p = bi[static_cast<std::size_t>(trial) % bi.size()];
    const WitnessPair a{random_psd(rng, 4, 1 + trial % 4), random_psd(rng, 4, 1 + trial % 3)};
    const WitnessPair b{random_psd(rng, 4, 4), random_psd(rng, 4, 2)};
    const double ea = condition_E(a, s, p, 6.0), eb = condition_E(b, s, p, 6.0);
    for (double t : {0.25, 0.5, 0.75}) {
      const WitnessPair mix{t * a.x + (1 - t) * b.x, t * a.p + (1 - t) * b.p};
      EXPECT_LE(condition_E(mix, s, p, 6.0), t * ea + (1 - t) * eb + 1e-8);
    }
  }
}

TEST(witness, random_search_single_trial_reproducible) {
  SearchConfig cfg = quick_config();
  cfg.trials = 1;
  const CVState s = builtin_state("klev4");
  const ViolationReport a = random_rank_one_search(s, bip("1|234"), cfg);
  const ViolationReport b = random_rank_one_search(s, bip("1|234"), cfg);
  EXPECT_EQ(a.h, b.h);
  EXPECT_EQ(a.g, b.g);
  EXPECT_EQ(*a.s, *b.s);
  ASSERT_EQ(a.h.size(), 4u);
}

TEST(witness, random_search_independent_of_threads) {
  const CVState s = builtin_state("klev4");
  SearchConfig cfg = quick_config();
  cfg.trials = 5000;
  cfg.threads = 1;
  const ViolationReport one = random_rank_one_search(s, bip("13|24"), cfg);
  for (int threads : {2, 3, 4}) {
    cfg.threads = threads;
    const ViolationReport many = random_rank_one_search(s, bip("13|24"), cfg);
    EXPECT_EQ(many.h, one.h);
    EXPECT_EQ(many.g, one.g);
    EXPECT_EQ(*many.s, *one.s);
  }
  cfg.seed = 100;
  EXPECT_NE(random_rank_one_search(s, bip("13|24"), cfg).h, one.h);
}

TEST(witness, random_search_report_is_self_consistent) {
  const CVState s = builtin_state("klev4");
  for (auto dist : {Distribution::kNormal, Distribution::kUniform}) {
    SearchConfig cfg = quick_config();
    cfg.distribution = dist;
    const ViolationReport r = random_rank_one_search(s, bip("14|23"), cfg);
    Eigen::Map<const Eigen::VectorXd> h(r.h.data(), 4), g(r.g.data(), 4);
    const ViolationReport again =
        violation_score({SymMatrix::outer(h), SymMatrix::outer(g)}, s, bip("14|23"));
    EXPECT_NEAR(*again.s, *r.s, 1e-6 * std::max(1.0, std::abs(*r.s)));
    EXPECT_NEAR(quantum_bound(r.certificate.certificate_x, r.certificate.certificate_p),
                r.bound, 1e-8);
    EXPECT_GT(*r.s, 0.0);
  }
}

TEST(witness, search_config_validation) {
  SearchConfig cfg = quick_config();
  cfg.trials = 0;
  EXPECT_THROW(random_rank_one_search(builtin_state("klev4"), bip("1|234"), cfg), Error);
  cfg = quick_config();
  cfg.C = 0.0;
  EXPECT_THROW(optimize_witness(builtin_state("klev4"), bip("1|234"), cfg), Error);
  EXPECT_THROW(random_rank_one_search(builtin_state("ppt4"), bip("1|234"), quick_config()),
               MissingErrorModel);
}

TEST(witness, optimize_matches_convex_optimum) {
  // Optima of the same convex program from an independent SDP solver.
  struct Case {
    const char* partition;
    double level, C, optimum;
  };
  const Case cases[] = {{"1|234", 6.0, 1.0, -2.244697},
                        {"1|234", 6.0, 2.0, -4.489395},
                        {"14|23", 6.0, 1.0, -1.127421},
                        {"14|23", 0.0, 1.0, -1.347986}};
  const CVState s = builtin_state("klev4");
  for (const Case& c : cases) {
    SearchConfig cfg = quick_config();
    cfg.s_level = c.level;
    cfg.C = c.C;
    const OptimizeResult r = optimize_witness(s, bip(c.partition), cfg);
    EXPECT_NEAR(r.objective, c.optimum, 1e-4 * c.C) << c.partition << " C=" << c.C;
    EXPECT_TRUE(r.certified);
    EXPECT_NEAR(r.report.G, c.C, 1e-12 * c.C);
    EXPECT_TRUE(is_psd(r.report.witness.x));
    EXPECT_TRUE(is_psd(r.report.witness.p));
  }
}

TEST(witness, optimize_is_homogeneous_in_C) {
  const CVState s = builtin_state("klev4");
  SearchConfig cfg = quick_config();
  const OptimizeResult one = optimize_witness(s, bip("12|34"), cfg);
  cfg.C = 2.0;
  const OptimizeResult two = optimize_witness(s, bip("12|34"), cfg);
  EXPECT_NEAR(two.report.G, 2 * one.report.G, 1e-9);
  EXPECT_NEAR(two.objective, 2 * one.objective, 1e-4);
  EXPECT_NEAR(two.report.bound - 6 * two.report.sigma,
              2 * (one.report.bound - 6 * one.report.sigma), 1e-4);
}

TEST(witness, optimize_has_no_false_positive_on_vacuum) {
  const CVState v = builtin_state("vacuum4");
  for (const auto& p : bipartitions(4)) {
    SearchConfig cfg = quick_config();
    cfg.restarts = 2;
    const OptimizeResult r = optimize_witness(v, p, cfg);
    EXPECT_FALSE(r.certified) << p.to_string();
    EXPECT_GE(r.objective, -cfg.C - 1e-9);
  }
}

TEST(witness, genuine_search_finds_certificate) {
  SearchConfig cfg = quick_config();
  cfg.s_level = 4.0;
  const GenuineResult g = genuine_search(builtin_state("klev4"), cfg);
  ASSERT_TRUE(g.found);
  ASSERT_EQ(g.reports.size(), 7u);
  EXPECT_GE(g.min_s, 4.0);
  for (const auto& r : g.reports) {
    const ViolationReport again = violation_score(g.witness, builtin_state("klev4"), r.partition);
    EXPECT_GE(*again.s, 4.0 - 1e-6) << r.partition.to_string();
  }
}

TEST(witness, genuine_search_accepts_printed_start) {
  SearchConfig cfg = quick_config();
  cfg.s_level = 4.0;
  cfg.start = builtin_witness("klev4-genuine");
  const GenuineResult g = genuine_search(builtin_state("klev4"), cfg);
  ASSERT_TRUE(g.found);
  EXPECT_NEAR(g.min_s, 4.43199, 0.01);
  EXPECT_EQ(g.iterations, 0);
}

TEST(witness, genuine_search_vacuum_not_found) {
  SearchConfig cfg = quick_config();
  cfg.s_level = 0.0;
  cfg.restarts = 3;
  const GenuineResult g = genuine_search(builtin_state("vacuum4"), cfg);
  EXPECT_FALSE(g.found);
  EXPECT_EQ(g.reports.size(), 7u);
  EXPECT_LT(g.min_s, 0.0);
}
