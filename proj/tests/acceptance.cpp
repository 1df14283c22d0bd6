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


// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "cvwitness/bounds.hpp"
#include "cvwitness/linalg.hpp"
#include "cvwitness/partitions.hpp"
#include "cvwitness/states.hpp"
#include "cvwitness/witness.hpp"
#include "test_support.hpp"

using namespace cvwitness;

namespace {

class Criterion {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: got %.9g want %.9g +- %.1e", what.c_str(), got, want, tol);
    expect(std::abs(got - want) <= tol, buf);
  }
  void at_least(double got, double floor, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: got %.9g want >= %.9g", what.c_str(), got, floor);
    expect(got >= floor, buf);
  }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::vector<std::string> failures_;
};

int run(int id, const char* title, double limit_seconds,
        const std::function<void(Criterion&)>& body) {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[96];
  std::snprintf(buf, sizeof buf, "runtime %.1f s exceeds %.0f s", secs, limit_seconds);
  c.expect(secs < limit_seconds, buf);
  const bool pass = c.failures().empty();
  std::printf("[%s] criterion %d: %s (%.2f s)\n", pass ? "PASS" : "FAIL", id, title, secs);
  for (const auto& f : c.failures()) std::printf("       %s\n", f.c_str());
  std::fflush(stdout);
  return pass ? 0 : 1;
}

void table1(Criterion& c) {
  const double q[] = {0, 3.46, 8.48, 15.49, 24.49, 35.49, 48.49};
  const double a[] = {5.00, 10.03, 17.06, 26.07, 37.08, 50.09};
  const double b[] = {5.46, 10.89, 18.26, 27.59, 38.89, 52.17};
  for (int n = 2; n <= 8; ++n) {
    const std::string tag = " n=" + std::to_string(n);
    const Table1Row row = table1_bounds(n);
    c.near(row.q, (n - 1) * std::sqrt(double(n) * (n - 2)), 1e-9, "q closed form" + tag);
    c.near(row.q, q[n - 2], 0.01, "q printed" + tag);
    c.near(row.f, n * (n - 1.0), 1e-4, "f" + tag);
    c.expect(row.converged, "ascent converged" + tag);
    if (n >= 3) {
      c.near(*row.a, a[n - 3], 0.01, "a" + tag);
      c.near(*row.b, b[n - 3], 0.01, "b" + tag);
    }
  }
}

void ppt_example(Criterion& c) {
  const double x = 0.144375, y = 0.084087, p = 0.232000, q = 0.039543;
  const CVState s = builtin_state("ppt4");
  const WitnessPair w = ppt_witness(x, y, p, q);
  c.near(evaluate_G(w, s), 0.435170, 1e-6, "G");
  const double commuting = 2 * (std::sqrt(x * p) + std::sqrt(y * q));
  c.near(commuting, 0.481359, 1e-6, "commuting certificate");
  c.at_least(separability_bound(w, parse_partition("12|34", 4)).value, 0.481359 - 1e-8,
             "B_12|34");
  for (int m = 0; m < 4; ++m) {
    c.expect(!is_physical(partial_transpose(s, {m})).physical,
             "single-mode transpose " + std::to_string(m + 1) + " unphysical");
  }
  for (int m = 1; m < 4; ++m) {
    c.expect(is_physical(partial_transpose(s, {0, m})).physical,
             "(2,2) transpose 1" + std::to_string(m + 1) + " physical");
  }
  for (const char* t : {"1|234", "2|134", "3|124", "4|123"}) {
    c.expect(lmi_separability_test(s, parse_partition(t, 4)).violated,
             std::string("LMI violated ") + t);
  }
  for (const char* t : {"12|34", "13|24", "14|23"}) {
    c.expect(!lmi_separability_test(s, parse_partition(t, 4)).violated,
             std::string("LMI passed ") + t);
  }
}

void genuine_certificate(Criterion& c) {
  const CVState s = builtin_state("klev4");
  const WitnessPair w = builtin_witness("klev4-genuine");
  c.near(evaluate_G(w, s), 1.47484, 1e-4, "G");
  c.near(measurement_sigma(w, s), 0.01947, 1e-4, "sigma");
  double min_s = std::numeric_limits<double>::infinity();
  for (const auto& cert : cvwitness::testing::klev4_certificates()) {
    const ViolationReport r = violation_score(w, s, parse_partition(cert.partition, 4));
    c.near(r.bound, cert.bound, 1e-3, std::string("B_") + cert.partition);
    SymMatrix xc = w.x, pc = w.p;
    for (const auto& [i, j, xv, pv] : cert.entries) {
      xc.set(i - 1, j - 1, xv);
      pc.set(i - 1, j - 1, pv);
    }
    c.near(quantum_bound(xc, pc), cert.bound, 1e-3,
           std::string("printed certificate ") + cert.partition);
    min_s = std::min(min_s, *r.s);
  }
  c.near(min_s, 4.43, 0.01, "minimum violation");
}

void table2_floors(Criterion& c) {
  const CVState s = builtin_state("klev4");
  SearchConfig cfg;
  cfg.trials = 1'000'000;
  cfg.seed = 7;
  const std::pair<const char*, double> floors[] = {
      {"1|234", 20}, {"4|123", 20}, {"12|34", 20}, {"13|24", 20},
      {"2|134", 12}, {"3|124", 12}, {"14|23", 7}};
  for (const auto& [text, floor] : floors) {
    const auto t0 = std::chrono::steady_clock::now();
    const ViolationReport r = random_rank_one_search(s, parse_partition(text, 4), cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.at_least(*r.s, floor, std::string("best s ") + text);
    c.expect(secs < 300, std::string("search time ") + text);
  }
}

void genuine_search_criterion(Criterion& c) {
  const CVState s = builtin_state("klev4");
  SearchConfig cfg;
  cfg.s_level = 4.0;
  cfg.seed = 1;
  const GenuineResult found = genuine_search(s, cfg);
  c.expect(found.found, "genuine search from random starts");
  c.at_least(found.min_s, 4.0, "found min s");
  for (const auto& r : found.reports) {
    c.at_least(*violation_score(found.witness, s, r.partition).s, 4.0 - 1e-6,
               "recomputed " + r.partition.to_string());
  }
  cfg.start = builtin_witness("klev4-genuine");
  const GenuineResult seeded = genuine_search(s, cfg);
  c.expect(seeded.found, "seeded search found");
  c.expect(seeded.iterations == 0, "seeded search succeeds immediately");
  c.near(seeded.min_s, 4.43, 0.01, "seeded min s");
}

void property_suites(Criterion& c) {
  using cvwitness::testing::random_pd;
  using cvwitness::testing::random_psd;
  std::mt19937_64 rng(2026);

  double worst_gap = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + t % 6;
    std::uniform_int_distribution<int> rank(1, n);
    worst_gap = std::min(worst_gap, alt_inequality_gap(random_psd(rng, n, rank(rng)),
                                                       random_psd(rng, n, rank(rng))));
  }
  c.at_least(worst_gap, -1e-9, "ALT gap over 1000 pairs");

  int hierarchy_bad = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 4;
    std::uniform_int_distribution<int> rank(1, n);
    const WitnessPair w{random_psd(rng, n, rank(rng)), random_psd(rng, n, rank(rng))};
    Partition fine = Partition::full(n);
    double prev = separability_bound(w, fine).value;
    const double base = quantum_bound(w.x, w.p);
    while (fine.num_blocks() > 1) {
      std::vector<int> labels(static_cast<std::size_t>(n));
      std::uniform_int_distribution<int> pick(1, fine.num_blocks() - 1);
      const int merged = pick(rng);
      for (int m = 0; m < n; ++m) {
        labels[m] = fine.block_of(m) == merged ? 0 : fine.block_of(m);
      }
      const Partition coarse = Partition::from_labels(labels);
      const double value = separability_bound(w, coarse).value;
      if (!is_finer(fine, coarse) || prev < value - 1e-8 || value < base - 1e-8) ++hierarchy_bad;
      prev = value;
      fine = coarse;
    }
  }
  c.expect(hierarchy_bad == 0, "hierarchy violations: " + std::to_string(hierarchy_bad));

  double worst_rel = 0.0;
  const double h = 1e-6;
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 5;
    const SymMatrix x = random_pd(rng, n), p = random_pd(rng, n);
    const auto g = quantum_bound_gradient(x, p);
    Eigen::MatrixXd fx(n, n), fp(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double weight = i == j ? 1.0 : 0.5;
        SymMatrix xp = x, xm = x, pp = p, pm = p;
        xp.set(i, j, x(i, j) + h);
        xm.set(i, j, x(i, j) - h);
        pp.set(i, j, p(i, j) + h);
        pm.set(i, j, p(i, j) - h);
        fx(i, j) = fx(j, i) = weight * (quantum_bound(xp, p) - quantum_bound(xm, p)) / (2 * h);
        fp(i, j) = fp(j, i) = weight * (quantum_bound(x, pp) - quantum_bound(x, pm)) / (2 * h);
      }
    }
    worst_rel = std::max({worst_rel, (fx - g.d_x.matrix()).norm() / g.d_x.matrix().norm(),
                          (fp - g.d_p.matrix()).norm() / g.d_p.matrix().norm()});
  }
  c.expect(worst_rel < 1e-5, "gradient relative error " + std::to_string(worst_rel));

  const CVState klev = builtin_state("klev4");
  const auto bi = bipartitions(4);
  int convex_bad = 0;
  for (int t = 0; t < 100; ++t) {
    const Partition& part = bi[static_cast<std::size_t>(t) % bi.size()];
    const WitnessPair a{random_psd(rng, 4, 1 + t % 4), random_psd(rng, 4, 1 + (t / 4) % 4)};
    const WitnessPair b{random_psd(rng, 4, 1 + (t / 2) % 4), random_psd(rng, 4, 4)};
    const double ea = condition_E(a, klev, part, 6.0), eb = condition_E(b, klev, part, 6.0);
    for (double th : {0.25, 0.5, 0.75}) {
      const WitnessPair mix{th * a.x + (1 - th) * b.x, th * a.p + (1 - th) * b.p};
      if (condition_E(mix, klev, part, 6.0) > th * ea + (1 - th) * eb + 1e-8) ++convex_bad;
    }
  }
  c.expect(convex_bad == 0, "convexity violations: " + std::to_string(convex_bad));

  c.near(confidence(1.1), 0.27, 0.01, "P(1.1)");
  c.near(confidence(3.15), 1.6e-3, 1e-4, "P(3.15)");
}

void partition_machinery(Criterion& c) {
  c.expect(bipartitions(6).size() == 31, "|bipartitions(6)| == 31");
  const Partition p = parse_partition("1,10|2,3,4,5,6,7,8,9", 10);
  c.expect(p.num_blocks() == 2 && p.same_block(0, 9), "ten-mode partition syntax");
  c.expect(bipartitions(10).size() == 511, "|bipartitions(10)| == 511");
}

}  // namespace

int main() {
  int failed = 0;
  failed += run(1, "Table I bounds", 120, table1);
  failed += run(2, "PPT example", 10, ppt_example);
  failed += run(3, "genuine certificate", 30, genuine_certificate);
  failed += run(4, "random search floors", 7 * 300, table2_floors);
  failed += run(5, "genuine search", 1800, genuine_search_criterion);
  failed += run(6, "property suites", 600, property_suites);
  failed += run(7, "partition machinery", 10, partition_machinery);
  std::printf("%d of 7 criteria passed\n", 7 - failed);
  return failed == 0 ? 0 : 1;
}
