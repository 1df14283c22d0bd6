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


#include "cvwitness/bounds.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"

#include "cvwitness/error.hpp"
#include "test_support.hpp"

using namespace cvwitness;
using cvwitness::testing::klev4_certificates;
using cvwitness::testing::random_pd;
using cvwitness::testing::random_psd;

namespace {

constexpr double kX = 0.144375, kY = 0.084087, kP = 0.232000, kQ = 0.039543;

Partition random_coarsening(const Partition& p, std::mt19937_64& rng) {
  // Merge two random blocks.
  if (p.num_blocks() < 2) return p;
  std::uniform_int_distribution<int> pick(0, p.num_blocks() - 1);
  const int a = pick(rng);
  int b = pick(rng);
  while (b == a) b = pick(rng);
  std::vector<int> labels(static_cast<std::size_t>(p.modes()));
  for (int m = 0; m < p.modes(); ++m) {
    labels[m] = p.block_of(m) == b ? a : p.block_of(m);
  }
  return Partition::from_labels(labels);
}

}  // namespace

TEST(bounds, evaluate_G_ppt_example) {
  EXPECT_NEAR(evaluate_G(ppt_witness(kX, kY, kP, kQ), builtin_state("ppt4")), 0.435170, 1e-6);
}

TEST(bounds, evaluate_G_genuine_example) {
  EXPECT_NEAR(evaluate_G(builtin_witness("klev4-genuine"), builtin_state("klev4")), 1.47484,
              1e-4);
}

TEST(bounds, evaluate_G_zero_and_mismatch) {
  const WitnessPair zero{SymMatrix::zero(4), SymMatrix::zero(4)};
  EXPECT_EQ(evaluate_G(zero, builtin_state("ppt4")), 0.0);
  const WitnessPair small{SymMatrix::zero(3), SymMatrix::zero(3)};
  EXPECT_THROW(evaluate_G(small, builtin_state("ppt4")), DimensionError);
}

TEST(bounds, make_witness_validates) {
  EXPECT_THROW(make_witness(SymMatrix{{1, 2}, {2, 1}}, SymMatrix::identity(2)), NotPSDError);
  EXPECT_THROW(make_witness(SymMatrix::identity(2), SymMatrix::identity(3)), DimensionError);
}

TEST(bounds, witness_json_round_trip) {
  const WitnessPair w = builtin_witness("klev4-genuine");
  const WitnessPair back = parse_witness(witness_to_json(w));
  EXPECT_EQ(back.x, w.x);
  EXPECT_EQ(back.p, w.p);
  EXPECT_THROW(parse_witness(R"({"n": 2, "X": [[1, 0], [0, 1]]})"), LoadError);
  EXPECT_THROW(builtin_witness("nosuch"), LoadError);
}

TEST(bounds, ppt_witness_is_psd) {
  const WitnessPair w = ppt_witness(kX, kY, kP, kQ);
  EXPECT_GE(min_eigenvalue(w.x), -1e-12);
  EXPECT_GE(min_eigenvalue(w.p), -1e-12);
  EXPECT_NEAR(w.x(0, 2), -std::sqrt(kX * kY), 1e-15);
  EXPECT_NEAR(w.p(0, 3), std::sqrt(kP * kQ), 1e-15);
}

TEST(bounds, trivial_partition_is_quantum_bound) {
  std::mt19937_64 rng(2);
  for (int n = 1; n <= 5; ++n) {
    const WitnessPair w{random_psd(rng, n, n), random_psd(rng, n, 1)};
    const BoundResult r = separability_bound(w, Partition::trivial(n));
    EXPECT_NEAR(r.value, quantum_bound(w.x, w.p), 1e-12);
    EXPECT_EQ(r.certificate_x, w.x);
  }
}

TEST(bounds, genuine_example_bounds) {
  const WitnessPair w = builtin_witness("klev4-genuine");
  for (const auto& cert : klev4_certificates()) {
    const BoundResult r = separability_bound(w, parse_partition(cert.partition, 4));
    EXPECT_NEAR(r.value, cert.bound, 1e-3) << cert.partition;
    EXPECT_TRUE(r.converged);
  }
}

TEST(bounds, printed_certificates_reproduce_bounds) {
  const WitnessPair w = builtin_witness("klev4-genuine");
  for (const auto& cert : klev4_certificates()) {
    SymMatrix x = w.x, p = w.p;
    for (const auto& [i, j, xv, pv] : cert.entries) {
      x.set(i - 1, j - 1, xv);
      p.set(i - 1, j - 1, pv);
    }
    EXPECT_NEAR(quantum_bound(x, p), cert.bound, 1e-3) << cert.partition;
  }
}

TEST(bounds, certificate_consistency) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 4;
    const WitnessPair w{random_psd(rng, n, 1 + trial % n), random_pd(rng, n)};
    const auto all = all_partitions(n);
    const Partition& part = all[static_cast<std::size_t>(trial) % all.size()];
    const BoundResult r = separability_bound(w, part);
    EXPECT_NEAR(quantum_bound(r.certificate_x, r.certificate_p), r.value, 1e-8);
    const FreeMask mask(part);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (mask(i, j)) continue;
        EXPECT_EQ(r.certificate_x(i, j), w.x(i, j));
        EXPECT_EQ(r.certificate_p(i, j), w.p(i, j));
      }
    }
  }
}

TEST(bounds, no_sampled_replacement_beats_maximum) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 2;
    const WitnessPair w{random_pd(rng, n), random_pd(rng, n)};
    const Partition part = bipartitions(n)[static_cast<std::size_t>(trial) % bipartitions(n).size()];
    const double best = separability_bound(w, part).value;
    const FreeMask mask(part);
    for (int sample = 0; sample < 300; ++sample) {
      SymMatrix x = w.x, p = w.p;
      const double scale = 0.05 * (1 + sample % 20);
      for (const auto& [i, j] : mask.pairs()) {
        x.set(i, j, w.x(i, j) + scale * normal(rng));
        p.set(i, j, w.p(i, j) + scale * normal(rng));
      }
      if (min_eigenvalue(x) < 0 || min_eigenvalue(p) < 0) continue;
      EXPECT_LE(quantum_bound(x, p), best + 1e-9);
    }
  }
}

TEST(bounds, hierarchy_on_partition_chains) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 4;
    std::uniform_int_distribution<int> rank(1, n);
    const WitnessPair w{random_psd(rng, n, rank(rng)), random_psd(rng, n, rank(rng))};
    const double base = quantum_bound(w.x, w.p);
    Partition fine = Partition::full(n);
    double previous = separability_bound(w, fine).value;
    while (fine.num_blocks() > 1) {
      const Partition coarse = random_coarsening(fine, rng);
      ASSERT_TRUE(is_finer(fine, coarse));
      const double value = separability_bound(w, coarse).value;
      EXPECT_GE(previous, value - 1e-8);
      EXPECT_GE(value, base - 1e-8);
      previous = value;
      fine = coarse;
    }
  }
}

TEST(bounds, rank_one_examples) {
  const std::vector<double> h = {1.0, 1.0}, g = {1.0, -1.0};
  EXPECT_NEAR(rank_one_bound(h, g, Partition::full(2)), 2.0, 1e-15);
  EXPECT_NEAR(rank_one_bound(h, g, Partition::trivial(2)), 0.0, 1e-15);
  const double a = 1.7;
  const std::vector<double> ha = {a, 1 / a}, ga = {a, -1 / a};
  EXPECT_NEAR(rank_one_bound(ha, ga, parse_partition("1|2", 2)), a * a + 1 / (a * a), 1e-12);

  const std::vector<double> h4 = {0.3, -1.2, 0.8, 2.0}, g4 = {1.5, 0.4, -0.7, 0.9};
  const double expected = std::abs(h4[0] * g4[0]) + std::abs(h4[1] * g4[1]) +
                          std::abs(h4[2] * g4[2] + h4[3] * g4[3]);
  EXPECT_NEAR(rank_one_bound(h4, g4, parse_partition("1|2|34", 4)), expected, 1e-15);
  EXPECT_THROW(rank_one_bound(h4, g, Partition::full(4)), DimensionError);
}

TEST(bounds, rank_one_certificate_and_feasibility) {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 4;
    std::vector<double> h(n), g(n);
    for (int i = 0; i < n; ++i) {
      h[i] = normal(rng);
      g[i] = normal(rng);
    }
    const auto all = all_partitions(n);
    const Partition& part = all[static_cast<std::size_t>(trial) % all.size()];
    const double closed = rank_one_bound(h, g, part);
    double dot = 0;
    for (int i = 0; i < n; ++i) dot += h[i] * g[i];
    EXPECT_GE(closed, std::abs(dot) - 1e-12);
    const WitnessPair cert = rank_one_certificate(h, g, part);
    EXPECT_NEAR(quantum_bound(cert.x, cert.p), closed, 1e-7);
    Eigen::Map<const Eigen::VectorXd> hv(h.data(), n), gv(g.data(), n);
    const WitnessPair w{SymMatrix::outer(hv), SymMatrix::outer(gv)};
    EXPECT_LE(closed, separability_bound(w, part).value + 1e-8);
  }
}

TEST(bounds, lmi_ppt_example) {
  const CVState s = builtin_state("ppt4");
  for (const char* text : {"1|234", "2|134", "3|124", "4|123"}) {
    const LmiResult r = lmi_separability_test(s, parse_partition(text, 4));
    EXPECT_TRUE(r.violated) << text;
    EXPECT_LT(r.min_eigenvalue, -1e-10);
    ASSERT_EQ(r.worst_signs.size(), 4u);
    EXPECT_EQ(r.worst_signs[0], 1);
  }
  for (const char* text : {"12|34", "13|24", "14|23"}) {
    EXPECT_FALSE(lmi_separability_test(s, parse_partition(text, 4)).violated) << text;
  }
}

TEST(bounds, lmi_vacuum_never_violated) {
  const CVState v = builtin_state("vacuum4");
  for (const auto& p : all_partitions(4)) {
    EXPECT_FALSE(lmi_separability_test(v, p).violated) << p.to_string();
  }
}

TEST(bounds, analytic_biseparable_bound_values) {
  EXPECT_NEAR(analytic_biseparable_bound(3), 5.00, 0.01);
  EXPECT_NEAR(analytic_biseparable_bound(4), 10.03, 0.01);
  EXPECT_NEAR(analytic_biseparable_bound(8), 50.09, 0.01);
  EXPECT_THROW(analytic_biseparable_bound(2), DimensionError);
}

TEST(bounds, symmetric_witness_shape) {
  const WitnessPair w = symmetric_witness(4);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(w.x(i, i), 3.0);
    EXPECT_EQ(w.p(i, i), 3.0);
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      EXPECT_EQ(w.x(i, j), 1.0);
      EXPECT_EQ(w.p(i, j), -1.0);
    }
  }
  EXPECT_NEAR(quantum_bound(symmetric_witness(2).x, symmetric_witness(2).p), 0.0, 1e-12);
  for (int n = 3; n <= 8; ++n) {
    const WitnessPair s = symmetric_witness(n);
    EXPECT_NEAR(quantum_bound(s.x, s.p), (n - 1) * std::sqrt(double(n) * (n - 2)), 1e-9);
  }
  EXPECT_THROW(symmetric_witness(1), DimensionError);
}

TEST(bounds, symmetric_witness_minimum_at_single_mode_cut) {
  for (int n = 4; n <= 6; ++n) {
    const WitnessPair w = symmetric_witness(n);
    const auto reps = symmetric_bipartition_representatives(n);
    EXPECT_LE(separability_bound(w, reps[0]).value, separability_bound(w, reps[1]).value + 1e-9)
        << "n=" << n;
  }
}

TEST(bounds, commuting_certificate_lower_bound) {
  const double commuting = 2 * (std::sqrt(kX * kP) + std::sqrt(kY * kQ));
  EXPECT_NEAR(commuting, 0.481359, 1e-6);
  const BoundResult r =
      separability_bound(ppt_witness(kX, kY, kP, kQ), parse_partition("12|34", 4));
  EXPECT_GE(r.value, commuting - 1e-8);
}

TEST(bounds, table1_columns) {
  const Table1Row four = table1_bounds(4);
  EXPECT_NEAR(four.q, 8.48, 0.01);
  EXPECT_NEAR(*four.a, 10.03, 0.01);
  EXPECT_NEAR(*four.b, 10.89, 0.01);
  EXPECT_NEAR(four.f, 12.0, 1e-4);
  EXPECT_TRUE(four.converged);

  const Table1Row six = table1_bounds(6);
  EXPECT_NEAR(six.q, 24.49, 0.01);
  EXPECT_NEAR(*six.a, 26.07, 0.01);
  EXPECT_NEAR(*six.b, 27.59, 0.01);
  EXPECT_NEAR(six.f, 30.0, 1e-4);

  const Table1Row two = table1_bounds(2);
  EXPECT_NEAR(two.q, 0.0, 1e-12);
  EXPECT_NEAR(two.f, 2.0, 1e-4);
  EXPECT_FALSE(two.a.has_value());
  EXPECT_FALSE(two.b.has_value());
}
