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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include <ceres/ceres.h>

#include "cvwitness/error.hpp"
#include "cvwitness/log.hpp"
#include "parallel.hpp"

namespace cvwitness {
namespace {

// Counter-based stream: SplitMix64 keyed by (seed, index).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  SplitMix64(std::uint64_t seed, std::uint64_t index)
      : state_(mix(seed) ^ mix(index + 0x632be59bd9b4e019ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

void require_error_model(const CVState& s, const char* op) {
  if (!s.has_error_model()) {
    throw MissingErrorModel(std::string(op) + ": state '" + s.label +
                            "' has no sigma_xx/sigma_pp error model");
  }
}

double frob(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.cwiseProduct(b).sum();
}

BoundResult rank_one_result(const std::vector<double>& h,
                            const std::vector<double>& g, const Partition& p) {
  BoundResult r;
  r.value = rank_one_bound(h, g, p);
  WitnessPair cert = rank_one_certificate(h, g, p);
  r.certificate_x = std::move(cert.x);
  r.certificate_p = std::move(cert.p);
  r.converged = true;
  return r;
}

ViolationReport assemble(const WitnessPair& w, const CVState& s,
                         const Partition& p, BoundResult cert) {
  ViolationReport r;
  r.partition = p;
  r.G = evaluate_G(w, s);
  r.sigma = s.has_error_model() ? measurement_sigma(w, s) : 0.0;
  r.bound = cert.value;
  r.margin = r.bound - r.G;
  if (r.sigma > 0.0) {
    r.s = r.margin / r.sigma;
    r.confidence = *r.s >= 0.0 ? std::erfc(*r.s / std::sqrt(2.0)) : 1.0;
  }
  r.converged = cert.converged;
  r.witness = w;
  r.certificate = std::move(cert);
  return r;
}

// --- Gradient searches over factored pairs X = A A^T, P = B B^T ----------

using Pair = std::pair<Eigen::MatrixXd, Eigen::MatrixXd>;

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// B_I as a sum of per-block quantumness bounds. Flipping the signs of one
// block's modes in both X and P negates every cross-block entry and leaves
// quantum_bound unchanged, so by joint concavity the maximum over the freed
// entries sits at zero.
//
// With X = A A^T and P = B B^T the block bound is the nuclear norm of
// M = A_b^T B_b (A_b, B_b the block's rows). For delta > 0 it is replaced by
// tr sqrt(M^T M + delta^2) - n delta, which is smooth at rank-deficient M;
// delta = 0 gives the exact value without gradients.
struct FactoredBound {
  double value = 0.0;
  RowMatrix grad_a;
  RowMatrix grad_b;
};

FactoredBound factored_bound(const RowMatrix& a, const RowMatrix& b,
                             const Partition& part, double delta, bool with_grad) {
  const Eigen::Index n = a.rows();
  FactoredBound out;
  if (with_grad) {
    out.grad_a = RowMatrix::Zero(n, n);
    out.grad_b = RowMatrix::Zero(n, n);
  }
  for (const auto& block : part.blocks()) {
    const auto m = static_cast<Eigen::Index>(block.size());
    RowMatrix ab(m, n), bb(m, n);
    for (Eigen::Index r = 0; r < m; ++r) {
      ab.row(r) = a.row(block[static_cast<std::size_t>(r)]);
      bb.row(r) = b.row(block[static_cast<std::size_t>(r)]);
    }
    const Eigen::MatrixXd mm = ab.transpose() * bb;
    if (delta <= 0.0) {
      out.value += Eigen::JacobiSVD<Eigen::MatrixXd>(mm).singularValues().sum();
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mm.transpose() * mm);
    if (es.info() != Eigen::Success) throw EigenSolverError("factored bound: eigensolver failed");
    const Eigen::VectorXd root =
        (es.eigenvalues().cwiseMax(0.0).array() + delta * delta).sqrt();
    out.value += root.sum() - static_cast<double>(n) * delta;
    if (!with_grad) continue;
    const Eigen::MatrixXd inv_root = es.eigenvectors() *
                                     root.cwiseInverse().asDiagonal() *
                                     es.eigenvectors().transpose();
    const Eigen::MatrixXd g = mm * inv_root;  // d value / d M
    const RowMatrix ga = bb * g.transpose();
    const RowMatrix gb = ab * g;
    for (Eigen::Index r = 0; r < m; ++r) {
      out.grad_a.row(block[static_cast<std::size_t>(r)]) += ga.row(r);
      out.grad_b.row(block[static_cast<std::size_t>(r)]) += gb.row(r);
    }
  }
  return out;
}

enum class Goal {
  // min (level * sigma - B_I) / G for one partition: the normalized program.
  kSinglePartition,
  // max of the soft minimum over partitions of (B_I - G) / sigma.
  kAllPartitions,
};

class FactoredObjective final : public ceres::FirstOrderFunction {
 public:
  FactoredObjective(const CVState& s, const std::vector<Partition>& parts,
                    Goal goal, double level, bool use_sigma)
      : s_(s), parts_(parts), goal_(goal), level_(level),
        use_sigma_(use_sigma && s.has_error_model()) {
    if (use_sigma_) {
      sxx2_ = s.sigma_xx->matrix().cwiseAbs2();
      spp2_ = s.sigma_pp->matrix().cwiseAbs2();
    }
  }

  void set_temperature(double mu) { mu_ = mu; }
  void set_smoothing(double delta) { delta_ = delta; }
  int NumParameters() const override { return 2 * s_.n * s_.n; }

  bool Evaluate(const double* z, double* cost, double* gradient) const override {
    const int n = s_.n;
    const Eigen::Map<const RowMatrix> a(z, n, n), b(z + n * n, n, n);
    const RowMatrix am = a, bm = b;
    const Eigen::MatrixXd x = am * am.transpose(), p = bm * bm.transpose();
    const double G = frob(x, s_.gamma_xx.matrix()) + frob(p, s_.gamma_pp.matrix());
    if (!(G > 0.0)) return false;
    const bool want = gradient != nullptr;
    double sigma = 0.0;
    RowMatrix sig_a, sig_b;  // d sigma / d(A, B)
    if (use_sigma_) {
      const Eigen::MatrixXd wx = x.cwiseProduct(sxx2_), wp = p.cwiseProduct(spp2_);
      sigma = std::sqrt(frob(x, wx) + frob(p, wp));
      if (!(sigma > 0.0)) return false;
      if (want) {
        sig_a = 2.0 * wx * am / sigma;
        sig_b = 2.0 * wp * bm / sigma;
      }
    } else if (goal_ == Goal::kAllPartitions) {
      return false;
    }
    const RowMatrix g_a = want ? RowMatrix(2.0 * s_.gamma_xx.matrix() * am) : RowMatrix();
    const RowMatrix g_b = want ? RowMatrix(2.0 * s_.gamma_pp.matrix() * bm) : RowMatrix();

    std::vector<FactoredBound> bounds;
    bounds.reserve(parts_.size());
    try {
      for (const auto& part : parts_)
        bounds.push_back(factored_bound(am, bm, part, delta_, want));
    } catch (const EigenSolverError&) {
      return false;
    }

    RowMatrix da, db;
    if (goal_ == Goal::kSinglePartition) {
      const FactoredBound& bi = bounds.front();
      const double num = level_ * sigma - bi.value;
      *cost = num / G;
      if (want) {
        da = -bi.grad_a / G - (num / (G * G)) * g_a;
        db = -bi.grad_b / G - (num / (G * G)) * g_b;
        if (use_sigma_) {
          da += (level_ / G) * sig_a;
          db += (level_ / G) * sig_b;
        }
      }
    } else {
      const std::size_t m = bounds.size();
      Eigen::VectorXd scores(static_cast<Eigen::Index>(m));
      for (std::size_t k = 0; k < m; ++k)
        scores(static_cast<Eigen::Index>(k)) = (bounds[k].value - G) / sigma;
      const double lo = scores.minCoeff();
      const Eigen::VectorXd raw = (-(scores.array() - lo) / mu_).exp();
      const double total = raw.sum();
      *cost = -(lo - mu_ * std::log(total));
      if (want) {
        da = RowMatrix::Zero(n, n);
        db = RowMatrix::Zero(n, n);
        for (std::size_t k = 0; k < m; ++k) {
          const double wk = raw(static_cast<Eigen::Index>(k)) / total;
          const double sk = scores(static_cast<Eigen::Index>(k));
          da -= wk * ((bounds[k].grad_a - g_a) / sigma - (sk / sigma) * sig_a);
          db -= wk * ((bounds[k].grad_b - g_b) / sigma - (sk / sigma) * sig_b);
        }
      }
    }
    if (!std::isfinite(*cost)) return false;
    if (want) {
      Eigen::Map<RowMatrix>(gradient, n, n) = da;
      Eigen::Map<RowMatrix>(gradient + n * n, n, n) = db;
    }
    return true;
  }

 private:
  const CVState& s_;
  const std::vector<Partition>& parts_;
  Goal goal_;
  double level_;
  bool use_sigma_;
  double mu_ = 1.0;
  double delta_ = 0.0;
  Eigen::MatrixXd sxx2_;
  Eigen::MatrixXd spp2_;
};

std::vector<double> pack(const Pair& w) {
  const int n = static_cast<int>(w.first.rows());
  std::vector<double> z(static_cast<std::size_t>(2 * n * n));
  auto factor = [](const Eigen::MatrixXd& m) {
    return sqrt_psd(SymMatrix(m)).matrix();
  };
  const Eigen::MatrixXd a = factor(w.first), b = factor(w.second);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      z[static_cast<std::size_t>(i * n + j)] = a(i, j);
      z[static_cast<std::size_t>(n * n + i * n + j)] = b(i, j);
    }
  return z;
}

// Unpacks and rescales to tr(X gxx) + tr(P gpp) = C.
WitnessPair unpack(const std::vector<double>& z, const CVState& s, double C) {
  const int n = s.n;
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      a(z.data(), n, n), b(z.data() + n * n, n, n);
  Eigen::MatrixXd x = a * a.transpose(), p = b * b.transpose();
  const double G = frob(x, s.gamma_xx.matrix()) + frob(p, s.gamma_pp.matrix());
  x *= C / G;
  p *= C / G;
  return {SymMatrix(x), SymMatrix(p)};
}

// Scales the factors so that tr(X gxx) + tr(P gpp) = C.
void renormalize(std::vector<double>& z, const CVState& s, double C) {
  const int n = s.n;
  const Eigen::Map<const RowMatrix> a(z.data(), n, n), b(z.data() + n * n, n, n);
  const double G = frob(a * a.transpose(), s.gamma_xx.matrix()) +
                   frob(b * b.transpose(), s.gamma_pp.matrix());
  if (!(G > 0.0)) return;
  const double k = std::sqrt(C / G);
  for (double& v : z) v *= k;
}

// Smoothing schedule shared by the searches: (soft-min temperature,
// nuclear-norm smoothing relative to C).
constexpr std::pair<double, double> kSchedule[] = {
    {1.0, 1e-2}, {0.3, 1e-3}, {0.1, 1e-4}, {0.03, 1e-5}, {0.01, 1e-6}};

// Random PD start R^T R + 0.1 1 for each matrix, keyed by (seed, attempt).
Pair random_start(int n, std::uint64_t seed, std::uint64_t attempt) {
  SplitMix64 rng(seed, attempt);
  std::normal_distribution<double> normal;
  auto draw = [&] {
    Eigen::MatrixXd r(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(i, j) = normal(rng);
    return Eigen::MatrixXd(r.transpose() * r +
                           0.1 * Eigen::MatrixXd::Identity(n, n));
  };
  Eigen::MatrixXd x = draw();
  Eigen::MatrixXd p = draw();
  return {std::move(x), std::move(p)};
}

struct SolveOutcome {
  std::vector<double> z;
  int iterations = 0;
  bool converged = false;
};

// Runs L-BFGS on `objective` from z; ownership of the objective stays with
// the caller.
SolveOutcome solve(FactoredObjective* objective, std::vector<double> z,
                   int max_iterations) {
  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_num_iterations = max_iterations;
  options.function_tolerance = 1e-13;
  options.gradient_tolerance = 1e-11;
  options.parameter_tolerance = 1e-13;
  options.logging_type = ceres::SILENT;
  options.minimizer_progress_to_stdout = false;
  // The problem does not own the objective.
  struct Borrowed final : ceres::FirstOrderFunction {
    explicit Borrowed(FactoredObjective* f) : f(f) {}
    bool Evaluate(const double* p, double* c, double* g) const override {
      return f->Evaluate(p, c, g);
    }
    int NumParameters() const override { return f->NumParameters(); }
    FactoredObjective* f;
  };
  ceres::GradientProblem problem(new Borrowed(objective));
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, z.data(), &summary);
  SolveOutcome out;
  out.iterations = static_cast<int>(summary.iterations.size());
  out.converged = summary.termination_type == ceres::CONVERGENCE;
  out.z = std::move(z);
  return out;
}

double min_score(const WitnessPair& w, const CVState& s,
                 const std::vector<Partition>& parts) {
  const double G = evaluate_G(w, s);
  const double sigma = measurement_sigma(w, s);
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& p : parts)
    lo = std::min(lo, (separability_bound(w, p).value - G) / sigma);
  return lo;
}

void validate_config(const SearchConfig& cfg) {
  if (cfg.trials < 1) throw Error("search: trials must be >= 1");
  if (!(cfg.C > 0.0)) throw Error("search: normalization C must be > 0");
  if (cfg.s_level < 0.0) throw Error("search: s_level must be >= 0");
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

double measurement_sigma(const WitnessPair& w, const CVState& s) {
  require_error_model(s, "measurement_sigma");
  if (w.modes() != s.n) {
    throw DimensionError("measurement_sigma: witness has " +
                         std::to_string(w.modes()) + " modes, state has " +
                         std::to_string(s.n));
  }
  const double sx = w.x.matrix().cwiseAbs2().cwiseProduct(
                        s.sigma_xx->matrix().cwiseAbs2()).sum();
  const double sp = w.p.matrix().cwiseAbs2().cwiseProduct(
                        s.sigma_pp->matrix().cwiseAbs2()).sum();
  return std::sqrt(sx + sp);
}

double condition_E(const WitnessPair& w, const CVState& s, const Partition& p,
                   double s_level, const AscentOptions& opts) {
  if (s_level < 0.0) throw Error("condition_E: s_level must be >= 0");
  const double sigma = measurement_sigma(w, s);
  return evaluate_G(w, s) + s_level * sigma -
         separability_bound(w, p, opts).value;
}

ViolationReport evaluate_report(const WitnessPair& w, const CVState& s,
                                const Partition& p, const AscentOptions& opts) {
  return assemble(w, s, p, separability_bound(w, p, opts));
}

ViolationReport violation_score(const WitnessPair& w, const CVState& s,
                                const Partition& p, const AscentOptions& opts) {
  if (measurement_sigma(w, s) == 0.0)
    throw ZeroSigmaError("violation_score: sigma(X, P) is zero");
  return evaluate_report(w, s, p, opts);
}

double confidence(double s) {
  if (s < 0.0) {
    std::ostringstream os;
    os << "confidence: negative score " << s << " clamped to P = 1";
    warn(os.str());
    return 1.0;
  }
  return std::erfc(s / std::sqrt(2.0));
}

ViolationReport random_rank_one_search(const CVState& s, const Partition& p,
                                       const SearchConfig& cfg) {
  validate_config(cfg);
  require_error_model(s, "random_rank_one_search");
  if (p.modes() != s.n) {
    throw DimensionError("random_rank_one_search: partition of " +
                         std::to_string(p.modes()) + " modes for a " +
                         std::to_string(s.n) + "-mode state");
  }
  const int n = s.n;
  const Eigen::MatrixXd& gxx = s.gamma_xx.matrix();
  const Eigen::MatrixXd& gpp = s.gamma_pp.matrix();
  const Eigen::MatrixXd sxx2 = s.sigma_xx->matrix().cwiseAbs2();
  const Eigen::MatrixXd spp2 = s.sigma_pp->matrix().cwiseAbs2();

  struct Best {
    double s = -std::numeric_limits<double>::infinity();
    std::int64_t index = -1;
  };
  const int threads = resolve_threads(cfg.threads);
  const auto chunks = static_cast<std::size_t>(threads);
  std::vector<Best> best(chunks);
  const auto trials = static_cast<std::size_t>(cfg.trials);

  auto draw = [&](std::int64_t index, Eigen::VectorXd& h, Eigen::VectorXd& g) {
    SplitMix64 rng(cfg.seed, static_cast<std::uint64_t>(index));
    if (cfg.distribution == Distribution::kNormal) {
      std::normal_distribution<double> d;
      for (int i = 0; i < n; ++i) h(i) = d(rng);
      for (int i = 0; i < n; ++i) g(i) = d(rng);
    } else {
      std::uniform_real_distribution<double> d(-1.0, 1.0);
      for (int i = 0; i < n; ++i) h(i) = d(rng);
      for (int i = 0; i < n; ++i) g(i) = d(rng);
    }
  };

  detail::parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t begin = trials * c / chunks;
    const std::size_t end = trials * (c + 1) / chunks;
    Eigen::VectorXd h(n), g(n), hh(n), gg(n);
    double block_sums[Partition::kMaxModes];
    Best local;
    for (std::size_t t = begin; t < end; ++t) {
      draw(static_cast<std::int64_t>(t), h, g);
      const double G = h.dot(gxx * h) + g.dot(gpp * g);
      hh = h.cwiseAbs2();
      gg = g.cwiseAbs2();
      const double var = hh.dot(sxx2 * hh) + gg.dot(spp2 * gg);
      if (!(var > 0.0)) continue;
      std::fill(block_sums, block_sums + p.num_blocks(), 0.0);
      for (int i = 0; i < n; ++i) block_sums[p.block_of(i)] += h(i) * g(i);
      double bound = 0.0;
      for (int b = 0; b < p.num_blocks(); ++b) bound += std::abs(block_sums[b]);
      const double score = (bound - G) / std::sqrt(var);
      if (score > local.s) {
        local.s = score;
        local.index = static_cast<std::int64_t>(t);
      }
    }
    best[c] = local;
  });

  Best winner;
  for (const Best& b : best) {
    if (b.index >= 0 && (b.s > winner.s || (b.s == winner.s && b.index < winner.index)))
      winner = b;
  }
  if (winner.index < 0) throw ZeroSigmaError("random_rank_one_search: every draw had sigma = 0");

  Eigen::VectorXd h(n), g(n);
  draw(winner.index, h, g);
  std::vector<double> hv(h.data(), h.data() + n), gv(g.data(), g.data() + n);
  WitnessPair w{SymMatrix::outer(h), SymMatrix::outer(g)};
  ViolationReport r = assemble(w, s, p, rank_one_result(hv, gv, p));
  r.h = std::move(hv);
  r.g = std::move(gv);
  return r;
}

OptimizeResult optimize_witness(const CVState& s, const Partition& p,
                                const SearchConfig& cfg) {
  validate_config(cfg);
  if (!cfg.ignore_sigma) require_error_model(s, "optimize_witness");
  if (p.modes() != s.n) {
    throw DimensionError("optimize_witness: partition of " +
                         std::to_string(p.modes()) + " modes for a " +
                         std::to_string(s.n) + "-mode state");
  }
  const double level = cfg.ignore_sigma ? 0.0 : cfg.s_level;
  const std::vector<Partition> parts{p};

  const int attempts = cfg.start ? 1 : std::max(1, std::min(cfg.restarts, 4));
  std::vector<std::optional<SolveOutcome>> outcomes(static_cast<std::size_t>(attempts));
  std::vector<double> values(static_cast<std::size_t>(attempts),
                             std::numeric_limits<double>::infinity());
  detail::parallel_for(outcomes.size(), resolve_threads(cfg.threads), [&](std::size_t a) {
    FactoredObjective objective(s, parts, Goal::kSinglePartition, level,
                                !cfg.ignore_sigma);
    const Pair start = cfg.start ? Pair{cfg.start->x.matrix(), cfg.start->p.matrix()}
                                 : random_start(s.n, cfg.seed, a);
    SolveOutcome out;
    out.z = pack(start);
    for (const auto& [mu, delta] : kSchedule) {
      renormalize(out.z, s, cfg.C);
      objective.set_smoothing(delta * cfg.C);
      SolveOutcome stage = solve(&objective, std::move(out.z), cfg.max_iterations);
      stage.iterations += out.iterations;
      out = std::move(stage);
    }
    objective.set_smoothing(0.0);
    double value;
    if (objective.Evaluate(out.z.data(), &value, nullptr)) {
      values[a] = value;
      outcomes[a] = std::move(out);
    }
  });

  std::size_t best = outcomes.size();
  for (std::size_t a = 0; a < outcomes.size(); ++a)
    if (outcomes[a] && (best == outcomes.size() || values[a] < values[best])) best = a;
  if (best == outcomes.size())
    throw SingularGradientError("optimize_witness: no start could be evaluated");

  OptimizeResult result;
  for (const auto& o : outcomes)
    if (o) result.iterations += o->iterations;
  result.converged = outcomes[best]->converged;
  const WitnessPair w = unpack(outcomes[best]->z, s, cfg.C);
  result.report = evaluate_report(w, s, p, cfg.ascent);
  if (cfg.ignore_sigma) {
    result.report.s.reset();
    result.report.confidence.reset();
  }
  result.objective = level * result.report.sigma - result.report.bound;
  result.certified = result.objective < -result.report.G;
  result.report.converged = result.report.converged && result.converged;
  if (cfg.progress) cfg.progress(0, result.iterations, result.objective);
  return result;
}

GenuineResult genuine_search(const CVState& s, const SearchConfig& cfg) {
  validate_config(cfg);
  require_error_model(s, "genuine_search");
  if (s.n < 3) throw DimensionError("genuine_search: need n >= 3 modes");
  const std::vector<Partition> parts = bipartitions(s.n);
  // Stop slightly above the target so that every score recomputed from the
  // reported pair stays at or above it.
  const double stop_at = cfg.s_level * (1.0 + 1e-6) + 1e-9;

  struct Attempt {
    std::optional<WitnessPair> w;
    double score = -std::numeric_limits<double>::infinity();
    int iterations = 0;
  };
  auto attempt = [&](std::uint64_t index) {
    Attempt out;
    const bool seeded = index == 0 && cfg.start.has_value();
    const Pair start = seeded ? Pair{cfg.start->x.matrix(), cfg.start->p.matrix()}
                              : random_start(s.n, cfg.seed, index);
    std::vector<double> z = pack(start);
    try {
      const WitnessPair w0 = unpack(z, s, cfg.C);
      out.score = min_score(w0, s, parts);
      out.w = w0;
    } catch (const Error&) {
    }
    if (out.score >= stop_at) return out;
    FactoredObjective objective(s, parts, Goal::kAllPartitions, 0.0, true);
    for (const auto& [mu, delta] : kSchedule) {
      renormalize(z, s, cfg.C);
      objective.set_temperature(mu);
      objective.set_smoothing(delta * cfg.C);
      SolveOutcome r = solve(&objective, std::move(z), cfg.max_iterations);
      out.iterations += r.iterations;
      z = std::move(r.z);
      try {
        const WitnessPair w = unpack(z, s, cfg.C);
        const double score = min_score(w, s, parts);
        if (score > out.score) {
          out.score = score;
          out.w = w;
        }
      } catch (const Error&) {
      }
      if (out.score >= stop_at) break;
    }
    return out;
  };

  GenuineResult result;
  Attempt best;
  const int threads = resolve_threads(cfg.threads);
  const int budget = std::max(1, cfg.restarts);
  bool done = false;
  for (int batch = 0; batch < budget && !done; batch += threads) {
    const int size = std::min(threads, budget - batch);
    std::vector<Attempt> runs(static_cast<std::size_t>(size));
    detail::parallel_for(runs.size(), threads, [&](std::size_t i) {
      runs[i] = attempt(static_cast<std::uint64_t>(batch) + i);
    });
    for (std::size_t i = 0; i < runs.size(); ++i) {
      result.restarts = batch + static_cast<int>(i);
      result.iterations += runs[i].iterations;
      if (runs[i].w && runs[i].score > best.score) best = std::move(runs[i]);
      if (cfg.progress) cfg.progress(result.restarts, result.iterations, best.score);
      if (best.score >= stop_at) {
        done = true;
        break;
      }
    }
  }
  if (!best.w) throw SingularGradientError("genuine_search: no start could be evaluated");

  result.witness = *best.w;
  result.min_s = std::numeric_limits<double>::infinity();
  bool all = true;
  for (const auto& p : parts) {
    result.reports.push_back(evaluate_report(result.witness, s, p, cfg.ascent));
    const ViolationReport& r = result.reports.back();
    const double sk = r.s ? *r.s : -std::numeric_limits<double>::infinity();
    result.min_s = std::min(result.min_s, sk);
    all = all && sk >= cfg.s_level;
  }
  result.found = all;
  return result;
}

}  // namespace cvwitness
