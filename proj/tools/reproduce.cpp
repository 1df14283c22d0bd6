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

#include "reproduce.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cvwitness/bounds.hpp"
#include "cvwitness/linalg.hpp"
#include "cvwitness/partitions.hpp"
#include "cvwitness/states.hpp"
#include "cvwitness/witness.hpp"

namespace cvwitness::cli {
namespace {

Check near(std::string name, double computed, double expected, double tol) {
  return {std::move(name), computed, expected, tol, Relation::kNear};
}

Check at_least(std::string name, double computed, double floor) {
  return {std::move(name), computed, floor, 0.0, Relation::kAtLeast};
}

Check truth(std::string name, bool value) {
  return {std::move(name), value ? 1.0 : 0.0, 1.0, 0.0, Relation::kTrue};
}

std::vector<Check> table1() {
  // Printed to two decimals (truncated).
  const double q[] = {0, 3.46, 8.48, 15.49, 24.49, 35.49, 48.49};
  const double a[] = {5.00, 10.03, 17.06, 26.07, 37.08, 50.09};
  const double b[] = {5.46, 10.89, 18.26, 27.59, 38.89, 52.17};
  const double f[] = {2, 6, 12, 20, 30, 42, 56};
  std::vector<Check> checks;
  for (int n = 2; n <= 8; ++n) {
    const Table1Row row = table1_bounds(n);
    const std::string tag = "[n=" + std::to_string(n) + "]";
    checks.push_back(near("q" + tag, row.q, q[n - 2], 0.01));
    checks.push_back(near("q formula" + tag, row.q,
                          (n - 1) * std::sqrt(double(n) * (n - 2)), 1e-9));
    if (n >= 3) {
      checks.push_back(near("a" + tag, *row.a, a[n - 3], 0.01));
      checks.push_back(near("b" + tag, *row.b, b[n - 3], 0.01));
    }
    checks.push_back(near("f" + tag, row.f, f[n - 2], 1e-4));
    checks.push_back(truth("converged" + tag, row.converged));
  }
  return checks;
}

std::vector<Check> ppt4() {
  const CVState s = builtin_state("ppt4");
  const double x = 0.144375, y = 0.084087, p = 0.232000, q = 0.039543;
  const WitnessPair w = ppt_witness(x, y, p, q);
  std::vector<Check> checks;
  checks.push_back(near("G", evaluate_G(w, s), 0.435170, 1e-6));
  const SymMatrix xc = SymMatrix::diagonal(Eigen::Vector4d(x, x, y, y));
  const SymMatrix pc = SymMatrix::diagonal(Eigen::Vector4d(p, p, q, q));
  checks.push_back(near("commuting certificate", quantum_bound(xc, pc), 0.481359, 1e-6));
  checks.push_back(at_least("B_12|34",
                            separability_bound(w, parse_partition("12|34", 4)).value,
                            0.481359 - 1e-8));
  checks.push_back(truth("state physical", is_physical(s).physical));
  for (int m = 0; m < 4; ++m) {
    checks.push_back(truth("transpose {" + std::to_string(m + 1) + "} unphysical",
                           !is_physical(partial_transpose(s, {m})).physical));
  }
  for (int m = 1; m < 4; ++m) {
    checks.push_back(truth("transpose {1," + std::to_string(m + 1) + "} physical",
                           is_physical(partial_transpose(s, {0, m})).physical));
  }
  for (const char* text : {"1|234", "2|134", "3|124", "4|123"}) {
    checks.push_back(truth(std::string("LMI violated ") + text,
                           lmi_separability_test(s, parse_partition(text, 4)).violated));
  }
  for (const char* text : {"12|34", "13|24", "14|23"}) {
    checks.push_back(truth(std::string("LMI passed ") + text,
                           !lmi_separability_test(s, parse_partition(text, 4)).violated));
  }
  return checks;
}

struct PrintedCertificate {
  const char* partition;
  double bound;
  // Optimized entries (i, j, X'_ij, P'_ij), one-based.
  std::vector<std::tuple<int, int, double, double>> entries;
};

std::vector<PrintedCertificate> klev4_certificates() {
  return {
      {"1|234", 1.65474,
       {{1, 2, -0.10873, -0.11914}, {1, 3, 0.158136, 0.113758}, {1, 4, 0.116524, 0.083761}}},
      {"2|134", 1.66193,
       {{1, 2, -0.07310, -0.05400}, {2, 3, -0.03586, -0.01432}, {2, 4, -0.01993, 0.02340}}},
      {"3|124", 1.56935,
       {{1, 3, 0.22149, 0.02836}, {2, 3, -0.01671, -0.07629}, {3, 4, 0.24154, 0.12842}}},
      {"4|123", 1.63974,
       {{1, 4, 0.15483, 0.05094}, {2, 4, 0.04047, -0.05608}, {3, 4, 0.23966, 0.12953}}},
      {"12|34", 1.81056,
       {{1, 3, 0.19766, 0.11949}, {1, 4, 0.11649, 0.06522},
        {2, 3, -0.02260, -0.02001}, {2, 4, 0.03156, 0.02362}}},
      {"13|24", 1.74993,
       {{1, 2, -0.10013, -0.07273}, {1, 4, 0.12997, 0.06225},
        {2, 3, -0.03695, -0.05209}, {3, 4, 0.25436, 0.17734}}},
      {"14|23", 1.56114,
       {{1, 2, -0.11435, -0.09531}, {1, 3, 0.18571, 0.05497},
        {2, 4, -0.02360, -0.02171}, {3, 4, 0.25307, 0.12643}}},
  };
}

std::vector<Check> genuine4() {
  const CVState s = builtin_state("klev4");
  const WitnessPair w = builtin_witness("klev4-genuine");
  std::vector<Check> checks;
  checks.push_back(near("G", evaluate_G(w, s), 1.47484, 1e-4));
  checks.push_back(near("sigma", measurement_sigma(w, s), 0.01947, 1e-4));
  double min_s = std::numeric_limits<double>::infinity();
  for (const auto& cert : klev4_certificates()) {
    const Partition part = parse_partition(cert.partition, 4);
    const ViolationReport r = violation_score(w, s, part);
    min_s = std::min(min_s, *r.s);
    checks.push_back(near(std::string("B_") + cert.partition, r.bound, cert.bound, 1e-3));
    SymMatrix xc = w.x, pc = w.p;
    for (const auto& [i, j, xv, pv] : cert.entries) {
      xc.set(i - 1, j - 1, xv);
      pc.set(i - 1, j - 1, pv);
    }
    checks.push_back(near(std::string("printed certificate ") + cert.partition,
                          quantum_bound(xc, pc), cert.bound, 1e-3));
  }
  checks.push_back(near("s0", min_s, 4.43199, 0.01));
  return checks;
}

std::vector<Check> alt_property() {
  std::mt19937_64 rng(20260101);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> dim(1, 6);
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dim(rng);
    auto draw = [&] {
      std::uniform_int_distribution<int> rank(1, n);
      Eigen::MatrixXd r(n, rank(rng));
      for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = normal(rng);
      return SymMatrix(r * r.transpose());
    };
    const SymMatrix x = draw(), p = draw();
    worst = std::min(worst, alt_inequality_gap(x, p));
  }
  return {at_least("min ALT gap over 1000 pairs", worst, -1e-9)};
}

}  // namespace

bool Check::pass() const {
  switch (relation) {
    case Relation::kNear:
      return std::abs(computed - expected) <= tolerance;
    case Relation::kAtLeast:
      return computed >= expected;
    case Relation::kTrue:
      return computed == 1.0;
  }
  return false;
}

std::vector<std::string> reproduce_targets() {
  return {"table1", "ppt4", "genuine4", "alt-property"};
}

std::vector<Check> reproduce(const std::string& target) {
  if (target == "table1") return table1();
  if (target == "ppt4") return ppt4();
  if (target == "genuine4") return genuine4();
  if (target == "alt-property") return alt_property();
  throw std::invalid_argument("unknown reproduce target '" + target + "'");
}

}  // namespace cvwitness::cli
