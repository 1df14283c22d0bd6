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

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "cvwitness/error.hpp"
#include "json_io.hpp"

namespace cvwitness {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-16;
constexpr double kMaxStepGrowth = 1e6;
constexpr double kTailTolerance = 1e-6;
constexpr double kLmiTolerance = 1e-10;
constexpr int kMaxLmiBlocks = 24;

bool strictly_pd(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(m - kPdThreshold * Eigen::MatrixXd::Identity(n, n));
  return llt.info() == Eigen::Success;
}

// Copies the entries of `src` on the free mask into `dst`.
Eigen::MatrixXd with_free_entries(const Eigen::MatrixXd& dst,
                                  const Eigen::MatrixXd& src,
                                  const FreeMask& mask) {
  Eigen::MatrixXd out = dst;
  for (auto [i, j] : mask.pairs()) {
    out(i, j) = src(i, j);
    out(j, i) = src(i, j);
  }
  return out;
}

Eigen::MatrixXd masked(const Eigen::MatrixXd& m, const FreeMask& mask) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (auto [i, j] : mask.pairs()) {
    out(i, j) = m(i, j);
    out(j, i) = m(j, i);
  }
  return out;
}

struct Point {
  Eigen::MatrixXd x;
  Eigen::MatrixXd p;
  double value = -std::numeric_limits<double>::infinity();
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dp;
};

// Value and gradient at a strictly PD point; nullopt when the gradient is
// singular there.
std::optional<Point> evaluate(Eigen::MatrixXd x, Eigen::MatrixXd p) {
  try {
    auto r = quantum_bound_with_gradient(SymMatrix(x), SymMatrix(p));
    Point pt;
    pt.value = r.value;
    pt.dx = r.gradient.d_x.matrix();
    pt.dp = r.gradient.d_p.matrix();
    pt.x = std::move(x);
    pt.p = std::move(p);
    return pt;
  } catch (const SingularGradientError&) {
    return std::nullopt;
  }
}

struct AscentOutcome {
  Point best;
  int iterations = 0;
  bool converged = false;
};

AscentOutcome ascend(Point start, const FreeMask& mask,
                     const AscentOptions& opts) {
  AscentOutcome out;
  Point cur = std::move(start);
  double step = opts.initial_step;
  int quiet = 0;
  std::deque<double> gains;

  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const Eigen::MatrixXd dir_x = masked(cur.dx, mask);
    const Eigen::MatrixXd dir_p = masked(cur.dp, mask);
    const double slope = dir_x.squaredNorm() + dir_p.squaredNorm();
    if (std::sqrt(slope) < opts.gradient_tolerance) {
      out.converged = true;
      break;
    }

    std::optional<Point> next;
    double t = step;
    for (; t >= kMinStep; t *= 0.5) {
      Eigen::MatrixXd xn = cur.x + t * dir_x;
      Eigen::MatrixXd pn = cur.p + t * dir_p;
      if (!strictly_pd(xn) || !strictly_pd(pn)) continue;
      auto cand = evaluate(std::move(xn), std::move(pn));
      if (cand && cand->value >= cur.value + kArmijo * t * slope) {
        next = std::move(cand);
        break;
      }
    }
    if (!next) {
      // Line search stalled against the PSD boundary (or at rounding level):
      // the supremum is approached; accept it when the gains so far form a
      // convergent tail below tolerance.
      double tail = 0.0;
      if (gains.size() >= 2) {
        const double last = gains.back();
        const double prev = gains[gains.size() - 2];
        const double r = prev > 0.0 ? last / prev : 1.0;
        tail = r < 1.0 ? last * r / (1.0 - r)
                       : std::numeric_limits<double>::infinity();
      }
      out.converged = tail < kTailTolerance;
      break;
    }

    const double gain = next->value - cur.value;
    gains.push_back(gain);
    if (gains.size() > 8) gains.pop_front();
    cur = std::move(*next);
    step = std::min(2.0 * t, kMaxStepGrowth * opts.initial_step);

    if (gain <= opts.relative_tolerance * std::abs(cur.value)) {
      if (++quiet >= opts.stall_window) {
        out.converged = true;
        ++it;
        break;
      }
    } else {
      quiet = 0;
    }
  }
  out.iterations = it;
  out.best = std::move(cur);
  return out;
}

void require_dims(const WitnessPair& w, int n, const char* op) {
  if (w.x.dim() != n || w.p.dim() != n) {
    std::ostringstream os;
    os << op << ": witness is " << w.x.dim() << "x" << w.x.dim() << "/"
       << w.p.dim() << "x" << w.p.dim() << ", expected " << n << " modes";
    throw DimensionError(os.str());
  }
}

}  // namespace

WitnessPair make_witness(SymMatrix x, SymMatrix p) {
  if (x.dim() != p.dim()) {
    std::ostringstream os;
    os << "witness: X is " << x.dim() << "x" << x.dim() << " but P is "
       << p.dim() << "x" << p.dim();
    throw DimensionError(os.str());
  }
  require_psd(x, "witness X");
  require_psd(p, "witness P");
  return {std::move(x), std::move(p)};
}

WitnessPair parse_witness(std::string_view json_text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw LoadError(std::string("witness: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw LoadError("witness: top level must be an object");
  try {
    if (!doc.contains("X") || !doc.contains("P"))
      throw LoadError("witness: 'X' and 'P' are required");
    const int n = doc.contains("n") ? doc.at("n").get<int>()
                                    : static_cast<int>(doc.at("X").size());
    if (n < 1 || n > Partition::kMaxModes)
      throw LoadError("witness: n=" + std::to_string(n) + " outside [1, 32]");
    return make_witness(detail::read_json_matrix(doc, "X", n, "witness"),
                        detail::read_json_matrix(doc, "P", n, "witness"));
  } catch (const json::exception& e) {
    throw LoadError(std::string("witness: ") + e.what());
  }
}

WitnessPair load_witness(const std::string& path) {
  try {
    return parse_witness(detail::read_text_file(path));
  } catch (const LoadError& e) {
    throw LoadError(path + ": " + e.what());
  }
}

std::string witness_to_json(const WitnessPair& w) {
  std::ostringstream os;
  os << "{\n  \"n\": " << w.modes() << ",\n  \"X\": ";
  detail::write_json_matrix(os, w.x, 2);
  os << ",\n  \"P\": ";
  detail::write_json_matrix(os, w.p, 2);
  os << "\n}\n";
  return os.str();
}

WitnessPair ppt_witness(double x, double y, double p, double q) {
  const double xy = std::sqrt(x * y), pq = std::sqrt(p * q);
  return make_witness(SymMatrix{{x, 0, -xy, 0}, {0, x, 0, xy}, {-xy, 0, y, 0}, {0, xy, 0, y}},
                      SymMatrix{{p, 0, 0, pq}, {0, p, pq, 0}, {0, pq, q, 0}, {pq, 0, 0, q}});
}

WitnessPair builtin_witness(std::string_view name) {
  if (name == "klev4-genuine") {
    return make_witness(SymMatrix{{0.39234, -0.20267, 0.24691, 0.30527},
                                  {-0.20267, 0.88526, 0.09450, 0.09080},
                                  {0.24691, 0.09450, 0.58391, 0.20795},
                                  {0.30527, 0.09080, 0.20795, 0.39504}},
                        SymMatrix{{0.22992, -0.13140, -0.00477, -0.11723},
                                  {-0.13140, 0.52598, -0.32316, -0.16699},
                                  {-0.00477, -0.32316, 0.39949, 0.06971},
                                  {-0.11723, -0.16699, 0.06971, 0.31242}});
  }
  if (name == "ppt4-12-34") return ppt_witness(0.144375, 0.084087, 0.232000, 0.039543);
  throw LoadError("unknown builtin witness '" + std::string(name) + "'");
}

std::vector<std::string> builtin_witness_names() {
  return {"klev4-genuine", "ppt4-12-34"};
}

WitnessPair resolve_witness(const std::string& source) {
  for (const auto& name : builtin_witness_names())
    if (source == name) return builtin_witness(name);
  return load_witness(source);
}

double evaluate_G(const WitnessPair& w, const CVState& s) {
  require_dims(w, s.n, "evaluate_G");
  return w.x.matrix().cwiseProduct(s.gamma_xx.matrix()).sum() +
         w.p.matrix().cwiseProduct(s.gamma_pp.matrix()).sum();
}

BoundResult separability_bound(const WitnessPair& w, const Partition& part,
                               const AscentOptions& opts) {
  const int n = part.modes();
  require_dims(w, n, "separability_bound");
  require_psd(w.x, "witness X");
  require_psd(w.p, "witness P");

  BoundResult result;
  result.value = quantum_bound(w.x, w.p);
  result.certificate_x = w.x;
  result.certificate_p = w.p;
  result.converged = true;

  const FreeMask mask(part);
  if (mask.count() == 0) return result;

  const Eigen::MatrixXd& x0 = w.x.matrix();
  const Eigen::MatrixXd& p0 = w.p.matrix();
  const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(n, n);

  // Candidate starts: the input itself, the block-diagonal pair with all free
  // entries zeroed (PSD whenever the input is), and an optional warm start.
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> starts;
  starts.emplace_back(x0, p0);
  starts.emplace_back(with_free_entries(x0, zeros, mask),
                      with_free_entries(p0, zeros, mask));
  if (opts.warm_start && opts.warm_start->modes() == n) {
    starts.emplace_back(with_free_entries(x0, opts.warm_start->x.matrix(), mask),
                        with_free_entries(p0, opts.warm_start->p.matrix(), mask));
  }

  std::optional<Point> start;
  for (auto& [xs, ps] : starts) {
    if (!strictly_pd(xs) || !strictly_pd(ps)) continue;
    auto pt = evaluate(xs, ps);
    if (pt && (!start || pt->value > start->value)) start = std::move(pt);
  }

  // The block-diagonal pair is PSD whenever the input is, and it is the
  // global maximizer: conjugating both matrices by a block sign pattern
  // negates every free entry without changing quantum_bound, so by
  // concavity f(0) >= (f(z) + f(-z)) / 2 = f(z). It is evaluated without
  // gradients, which also covers singular (e.g. rank-one) witnesses.
  const SymMatrix block_x(starts[1].first), block_p(starts[1].second);
  const double block_value = quantum_bound(block_x, block_p);
  if (block_value >= result.value) {
    result.value = block_value;
    result.certificate_x = block_x;
    result.certificate_p = block_p;
  }
  if (!start) return result;

  const AscentOutcome ascent = ascend(std::move(*start), mask, opts);
  result.iterations = ascent.iterations;
  result.converged = ascent.converged;
  if (ascent.best.value > result.value) {
    result.value = ascent.best.value;
    result.certificate_x = SymMatrix(with_free_entries(x0, ascent.best.x, mask));
    result.certificate_p = SymMatrix(with_free_entries(p0, ascent.best.p, mask));
  } else {
    // Nothing beat the block-diagonal maximizer.
    result.converged = true;
  }
  return result;
}

double rank_one_bound(std::span<const double> h, std::span<const double> g,
                      const Partition& p) {
  if (h.size() != g.size() || static_cast<int>(h.size()) != p.modes()) {
    std::ostringstream os;
    os << "rank_one_bound: |h|=" << h.size() << ", |g|=" << g.size()
       << ", partition of " << p.modes() << " modes";
    throw DimensionError(os.str());
  }
  double block_sums[Partition::kMaxModes] = {};
  for (std::size_t i = 0; i < h.size(); ++i)
    block_sums[p.block_of(static_cast<int>(i))] += h[i] * g[i];
  double total = 0.0;
  for (int b = 0; b < p.num_blocks(); ++b) total += std::abs(block_sums[b]);
  return total;
}

WitnessPair rank_one_certificate(std::span<const double> h,
                                 std::span<const double> g,
                                 const Partition& p) {
  rank_one_bound(h, g, p);  // validates sizes
  const int n = p.modes();
  std::vector<double> block_sums(static_cast<std::size_t>(p.num_blocks()), 0.0);
  for (int i = 0; i < n; ++i) block_sums[p.block_of(i)] += h[i] * g[i];
  Eigen::VectorXd hs(n), gs(n);
  for (int i = 0; i < n; ++i) {
    const double sign = block_sums[p.block_of(i)] < 0.0 ? -1.0 : 1.0;
    hs(i) = h[i];
    gs(i) = sign * g[i];
  }
  return {SymMatrix::outer(hs), SymMatrix::outer(gs)};
}

LmiResult lmi_separability_test(const CVState& s, const Partition& p) {
  if (p.modes() != s.n) {
    std::ostringstream os;
    os << "lmi_separability_test: partition of " << p.modes()
       << " modes for a " << s.n << "-mode state";
    throw DimensionError(os.str());
  }
  const int k = p.num_blocks();
  if (k > kMaxLmiBlocks) {
    throw DimensionError("lmi_separability_test: too many blocks (" +
                         std::to_string(k) + ")");
  }
  const int n = s.n;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = s.gamma_xx.matrix();
  m.bottomRightCorner(n, n) = s.gamma_pp.matrix();

  LmiResult result;
  result.min_eigenvalue = std::numeric_limits<double>::infinity();
  // Block 0 is pinned to +1: E and -E give unitarily equivalent matrices.
  const std::uint64_t patterns = std::uint64_t{1} << (k - 1);
  for (std::uint64_t bits = 0; bits < patterns; ++bits) {
    std::vector<int> signs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const int b = p.block_of(i);
      signs[static_cast<std::size_t>(i)] = b > 0 && (bits >> (b - 1) & 1u) ? -1 : 1;
      m(i, n + i) = m(n + i, i) = 0.5 * signs[static_cast<std::size_t>(i)];
    }
    const double lo = min_eigenvalue(SymMatrix(m));
    if (lo < result.min_eigenvalue) {
      result.min_eigenvalue = lo;
      result.worst_signs = std::move(signs);
    }
  }
  result.violated = result.min_eigenvalue < -kLmiTolerance;
  return result;
}

double analytic_biseparable_bound(int n) {
  if (n < 3) {
    throw DimensionError("analytic_biseparable_bound: n=" + std::to_string(n) +
                         ", need n >= 3");
  }
  const double nd = n;
  return (nd - 1.0) * std::sqrt(nd * (nd - 2.0)) +
         4.0 * (nd - 1.0) /
             (std::sqrt(nd) * (std::sqrt(2.0 * nd - 2.0) + std::sqrt(nd - 2.0)));
}

WitnessPair symmetric_witness(int n) {
  if (n < 2 || n > Partition::kMaxModes) {
    throw DimensionError("symmetric_witness: n=" + std::to_string(n) +
                         ", need 2 <= n <= 32");
  }
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, n);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  return {SymMatrix((n - 2.0) * id + ones), SymMatrix(double(n) * id - ones)};
}

Table1Row table1_bounds(int n, const AscentOptions& opts) {
  const WitnessPair w = symmetric_witness(n);
  Table1Row row;
  row.n = n;
  row.q = quantum_bound(w.x, w.p);
  const BoundResult full = separability_bound(w, Partition::full(n), opts);
  row.f = full.value;
  row.converged = full.converged;
  if (n >= 3) {
    row.a = analytic_biseparable_bound(n);
    double best = std::numeric_limits<double>::infinity();
    for (const Partition& p : symmetric_bipartition_representatives(n)) {
      const BoundResult r = separability_bound(w, p, opts);
      best = std::min(best, r.value);
      row.converged = row.converged && r.converged;
    }
    row.b = best;
  }
  return row;
}

}  // namespace cvwitness
