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

#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cvwitness/bounds.hpp"
#include "cvwitness/error.hpp"
#include "cvwitness/partitions.hpp"
#include "cvwitness/report.hpp"
#include "cvwitness/states.hpp"
#include "cvwitness/witness.hpp"
#include "json.hpp"
#include "reproduce.hpp"

namespace cvwitness::cli {
namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v, int decimals = 5) {
  if (std::abs(v) < 0.5 * std::pow(10.0, -decimals)) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// Six decimals, or scientific notation for small non-zero magnitudes.
std::string fmt_value(double v) {
  if (v != 0.0 && std::abs(v) < 1e-3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }
  return fmt(v, 6);
}

std::string padded(const std::string& s, int width) {
  if (static_cast<int>(s.size()) >= width) return s;
  return s + std::string(static_cast<std::size_t>(width) - s.size(), ' ');
}

void print_matrix(std::ostream& out, const char* name, const SymMatrix& m) {
  out << "  " << name << ":\n";
  for (int i = 0; i < m.dim(); ++i) {
    out << "   ";
    for (int j = 0; j < m.dim(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " %10.5f", m(i, j));
      out << buf;
    }
    out << '\n';
  }
}

void write_json_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text << '\n';
}

Partition partition_arg(const std::string& text, int n) {
  if (text == "trivial") return Partition::trivial(n);
  if (text == "full") return Partition::full(n);
  return parse_partition(text, n);
}

struct AscentFlags {
  int max_iterations = AscentOptions{}.max_iterations;
  double tolerance = AscentOptions{}.gradient_tolerance;
  double initial_step = AscentOptions{}.initial_step;

  void attach(CLI::App* app) {
    app->add_option("--max-ascent-iterations", max_iterations,
                    "Iteration cap of the inner ascent")
        ->check(CLI::PositiveNumber);
    app->add_option("--ascent-tolerance", tolerance,
                    "Gradient-norm tolerance of the inner ascent")
        ->check(CLI::PositiveNumber);
    app->add_option("--initial-step", initial_step, "First ascent step length")
        ->check(CLI::PositiveNumber);
  }
  AscentOptions options() const {
    AscentOptions o;
    o.max_iterations = max_iterations;
    o.gradient_tolerance = tolerance;
    o.initial_step = initial_step;
    return o;
  }
};

int threads_from(int flag) {
  if (const char* env = std::getenv("CVWITNESS_THREADS"); env && *env) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("CVWITNESS_THREADS must be a positive integer, got '") +
                     env + "'");
  }
  return flag;
}

// --- bound -----------------------------------------------------------------

struct BoundArgs {
  std::string witness;
  int symmetric = 0;
  std::vector<std::string> partitions;
  bool table1 = false;
  std::string json_path;
  AscentFlags ascent;
};

json matrix_json(const SymMatrix& m) { return json(m.rows()); }

int cmd_bound(const BoundArgs& a, std::ostream& out) {
  if (a.witness.empty() == (a.symmetric == 0))
    throw UsageError("bound: give exactly one of --witness or --symmetric-witness");
  const AscentOptions opts = a.ascent.options();

  if (a.table1) {
    if (a.symmetric == 0) throw UsageError("bound: --table1 needs --symmetric-witness");
    if (a.symmetric < 2 || a.symmetric > 8)
      throw UsageError("bound: --table1 covers 2 <= n <= 8");
    const Table1Row row = table1_bounds(a.symmetric, opts);
    auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("-"); };
    out << padded("n", 4) << padded("q", 12) << padded("a", 12) << padded("b", 12)
        << "f\n";
    out << padded(std::to_string(row.n), 4) << padded(fmt(row.q), 12)
        << padded(opt(row.a), 12) << padded(opt(row.b), 12) << fmt(row.f) << '\n';
    if (!row.converged) out << "warning: an inner ascent hit its iteration cap\n";
    if (!a.json_path.empty()) {
      json j{{"n", row.n}, {"q", row.q},
             {"a", row.a ? json(*row.a) : json(nullptr)},
             {"b", row.b ? json(*row.b) : json(nullptr)},
             {"f", row.f}, {"converged", row.converged}};
      write_json_file(a.json_path, j.dump(2));
    }
    return kExitOk;
  }

  const WitnessPair w = a.symmetric ? symmetric_witness(a.symmetric)
                                    : resolve_witness(a.witness);
  const int n = w.modes();
  const double q = quantum_bound(w.x, w.p);
  out << "witness: " << (a.symmetric ? "symmetric n=" + std::to_string(n) : a.witness)
      << " (" << n << " modes)\n";
  out << "quantum bound B = " << fmt(q) << '\n';
  json j{{"n", n}, {"quantum_bound", q}};
  json bounds = json::array();
  for (const auto& text : a.partitions) {
    const Partition p = partition_arg(text, n);
    const BoundResult r = separability_bound(w, p, opts);
    out << "B_" << p.to_string() << " = " << fmt(r.value) << "  (iterations "
        << r.iterations << (r.converged ? ", converged" : ", NOT converged") << ")\n";
    print_matrix(out, "certificate X", r.certificate_x);
    print_matrix(out, "certificate P", r.certificate_p);
    bounds.push_back({{"partition", p.to_string()},
                      {"bound", r.value},
                      {"iterations", r.iterations},
                      {"converged", r.converged},
                      {"X", matrix_json(r.certificate_x)},
                      {"P", matrix_json(r.certificate_p)}});
  }
  j["bounds"] = std::move(bounds);
  if (!a.json_path.empty()) write_json_file(a.json_path, j.dump(2));
  return kExitOk;
}

// --- check -----------------------------------------------------------------

struct CheckArgs {
  std::string state;
  std::vector<std::string> partitions;
  std::string json_path;
};

int cmd_check(const CheckArgs& a, std::ostream& out) {
  const CVState s = resolve_state(a.state);
  const Physicality phys = is_physical(s);
  out << "state: " << s.label << " (" << s.n << " modes)\n";
  out << "physical: " << (phys.physical ? "yes" : "NO") << " (min symplectic eigenvalue "
      << fmt(phys.min_symplectic_eigenvalue) << ")\n";
  if (!phys.physical) throw UsageError("check: state '" + s.label + "' is not physical");

  std::vector<Partition> parts;
  for (const auto& text : a.partitions) {
    if (text == "all-bipartitions") {
      const auto all = bipartitions(s.n);
      parts.insert(parts.end(), all.begin(), all.end());
    } else {
      parts.push_back(partition_arg(text, s.n));
    }
  }
  if (parts.empty()) parts = bipartitions(s.n);

  json j{{"state", s.label},
         {"physical", phys.physical},
         {"min_symplectic_eigenvalue", phys.min_symplectic_eigenvalue}};
  json results = json::array();
  bool any = false;
  for (const Partition& p : parts) {
    out << "partition " << p.to_string() << '\n';
    bool detected = false;
    json transposes = json::array();
    // Unions of blocks up to complement: block 0 is never selected.
    const int k = p.num_blocks();
    for (std::uint64_t m = 1; m < (std::uint64_t{1} << (k - 1)); ++m) {
      const std::vector<int> modes = union_of_blocks(p, m << 1);
      const Physicality pt = is_physical(partial_transpose(s, modes));
      std::string label = "{";
      for (std::size_t i = 0; i < modes.size(); ++i)
        label += (i ? "," : "") + std::to_string(modes[i] + 1);
      label += "}";
      out << "  partial transpose " << padded(label, 12)
          << (pt.physical ? "physical  " : "UNPHYSICAL") << " (min symplectic eigenvalue "
          << fmt(pt.min_symplectic_eigenvalue) << ")\n";
      detected = detected || !pt.physical;
      transposes.push_back({{"modes", modes},
                            {"physical", pt.physical},
                            {"min_symplectic_eigenvalue", pt.min_symplectic_eigenvalue}});
    }
    const LmiResult lmi = lmi_separability_test(s, p);
    std::string signs;
    for (int v : lmi.worst_signs) signs += v > 0 ? '+' : '-';
    out << "  LMI test " << (lmi.violated ? "VIOLATED" : "passed") << " (min eigenvalue "
        << fmt(lmi.min_eigenvalue, 6) << ", signs " << signs << ")\n";
    detected = detected || lmi.violated;
    out << "  -> " << (detected ? "entangled across " + p.to_string()
                                : "separability not excluded")
        << '\n';
    any = any || detected;
    results.push_back({{"partition", p.to_string()},
                       {"partial_transposes", std::move(transposes)},
                       {"lmi_violated", lmi.violated},
                       {"lmi_min_eigenvalue", lmi.min_eigenvalue},
                       {"lmi_worst_signs", lmi.worst_signs},
                       {"entangled", detected}});
  }
  j["partitions"] = std::move(results);
  j["entangled"] = any;
  if (!a.json_path.empty()) write_json_file(a.json_path, j.dump(2));
  return any ? kExitCertified : kExitOk;
}

// --- search ----------------------------------------------------------------

struct SearchArgs {
  std::string state;
  std::vector<std::string> partitions;
  bool all_bipartitions = false;
  bool genuine = false;
  bool optimize = false;
  bool no_error = false;
  std::int64_t trials = 1'000'000;
  std::uint64_t seed = 0;
  double s_level = 6.0;
  std::optional<double> target_s;
  double C = 1.0;
  std::string distribution = "normal";
  std::string start_witness;
  int restarts = 200;
  int max_iterations = 2000;
  int threads = 0;
  bool verbose = false;
  std::string json_path;
  AscentFlags ascent;
};

int cmd_search(const SearchArgs& a, std::ostream& out, std::ostream& err) {
  const CVState s = resolve_state(a.state);
  const int modes_chosen = (a.genuine ? 1 : 0) + (a.all_bipartitions ? 1 : 0) +
                           (a.partitions.empty() ? 0 : 1);
  if (modes_chosen != 1)
    throw UsageError("search: give exactly one of --partition, --all-bipartitions, --genuine");
  if (a.no_error && a.genuine)
    throw UsageError("search: --genuine scores by sigma and cannot run with --no-error");
  if (!a.no_error && !s.has_error_model())
    throw UsageError("search: state '" + s.label +
                     "' has no sigma_xx/sigma_pp error model; pass --no-error");

  SearchConfig cfg;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.s_level = a.no_error ? 0.0 : a.s_level;
  cfg.C = a.C;
  cfg.distribution = a.distribution == "uniform" ? Distribution::kUniform : Distribution::kNormal;
  cfg.threads = threads_from(a.threads);
  cfg.restarts = a.restarts;
  cfg.max_iterations = a.max_iterations;
  cfg.ignore_sigma = a.no_error;
  cfg.ascent = a.ascent.options();
  if (!a.start_witness.empty()) cfg.start = resolve_witness(a.start_witness);
  if (a.verbose) {
    cfg.progress = [&err](int restart, int iterations, double score) {
      err << "restart " << restart << " iterations " << iterations << " best "
          << fmt(score) << '\n';
    };
  }

  if (a.genuine) {
    cfg.s_level = a.target_s.value_or(a.s_level);
    const GenuineResult g = genuine_search(s, cfg);
    out << "genuine search on " << s.label << ", target s = " << fmt(cfg.s_level, 2) << '\n';
    out << format_report_table(g.reports);
    out << (g.found ? "found" : "not found") << ": min s = " << fmt(g.min_s)
        << " after " << g.restarts + 1 << " start(s), " << g.iterations
        << " iterations\n";
    print_matrix(out, "X", g.witness.x);
    print_matrix(out, "P", g.witness.p);
    if (!a.json_path.empty()) write_json_file(a.json_path, genuine_to_json(g));
    return g.found ? kExitCertified : kExitOk;
  }

  std::vector<Partition> parts;
  if (a.all_bipartitions) parts = bipartitions(s.n);
  for (const auto& text : a.partitions) parts.push_back(partition_arg(text, s.n));

  std::vector<ViolationReport> reports;
  bool all_certified = true;
  for (const Partition& p : parts) {
    if (a.optimize || a.no_error) {
      OptimizeResult r = optimize_witness(s, p, cfg);
      all_certified = all_certified &&
                      (a.no_error ? r.report.margin > 0.0 : r.certified);
      reports.push_back(std::move(r.report));
    } else {
      ViolationReport r = random_rank_one_search(s, p, cfg);
      all_certified = all_certified && r.s && *r.s >= cfg.s_level;
      reports.push_back(std::move(r));
    }
  }
  out << (a.optimize || a.no_error ? "optimized witness" : "random rank-one search")
      << " on " << s.label;
  if (a.no_error) {
    out << ", scored by margin B_I - G\n";
  } else {
    out << ", s-level " << fmt(cfg.s_level, 2) << '\n';
  }
  out << format_report_table(reports);
  out << (all_certified ? "certified" : "not certified") << " for every requested partition\n";
  if (!a.json_path.empty()) write_json_file(a.json_path, reports_to_json(reports));
  return all_certified ? kExitCertified : kExitOk;
}

// --- reproduce -------------------------------------------------------------

int cmd_reproduce(const std::string& target, const std::string& json_path, std::ostream& out) {
  std::vector<Check> checks;
  try {
    checks = reproduce(target);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  out << padded("check", 34) << padded("computed", 14) << padded("expected", 14)
      << "status\n";
  int failures = 0;
  json arr = json::array();
  for (const Check& c : checks) {
    std::string expected;
    switch (c.relation) {
      case Relation::kNear:
        expected = fmt_value(c.expected) + " +- " + fmt_value(c.tolerance);
        break;
      case Relation::kAtLeast:
        expected = ">= " + fmt_value(c.expected);
        break;
      case Relation::kTrue:
        expected = "true";
        break;
    }
    const bool ok = c.pass();
    failures += ok ? 0 : 1;
    const std::string computed =
        c.relation == Relation::kTrue ? (c.computed == 1.0 ? "true" : "false") : fmt_value(c.computed);
    out << padded(c.name, 34) << padded(computed, 14) << padded(expected, 26)
        << (ok ? "ok" : "MISMATCH (delta " + fmt_value(c.computed - c.expected) + ")") << '\n';
    arr.push_back({{"check", c.name},
                   {"computed", c.computed},
                   {"expected", c.expected},
                   {"tolerance", c.tolerance},
                   {"pass", ok}});
  }
  out << (failures == 0 ? "all " + std::to_string(checks.size()) + " checks reproduced"
                        : std::to_string(failures) + " of " + std::to_string(checks.size()) +
                              " checks mismatched")
      << '\n';
  if (!json_path.empty()) write_json_file(json_path, json{{"target", target}, {"checks", arr}}.dump(2));
  return failures == 0 ? kExitOk : kExitCertified;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cvwitness: entanglement certification for Gaussian states from second moments"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  BoundArgs bound;
  auto* b = app.add_subcommand("bound", "Quantum and separability bounds of a witness");
  b->add_option("--witness", bound.witness, "Witness JSON file or builtin name");
  b->add_option("--symmetric-witness", bound.symmetric, "Use the symmetric n-mode witness")
      ->check(CLI::Range(2, 32));
  b->add_option("--partition", bound.partitions,
                "Partition such as 12|34, 1,2|3,4, 'trivial' or 'full' (repeatable)");
  b->add_flag("--table1", bound.table1, "Print the q, a, b, f lower bounds for the symmetric witness");
  b->add_option("--json", bound.json_path, "Write a JSON report here");
  bound.ascent.attach(b);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "Physicality, partial transposes and the LMI test");
  c->add_option("--state", check.state, "State JSON file or builtin name")->required();
  c->add_option("--partition", check.partitions,
                "Partition to test (repeatable; default: every bipartition)");
  c->add_option("--json", check.json_path, "Write a JSON report here");

  SearchArgs search;
  auto* s = app.add_subcommand("search", "Search for violating witnesses");
  s->add_option("--state", search.state, "State JSON file or builtin name")->required();
  s->add_option("--partition", search.partitions, "Partition to certify (repeatable)");
  s->add_flag("--all-bipartitions", search.all_bipartitions, "Search every bipartition");
  s->add_flag("--genuine", search.genuine, "One witness violating every bipartition bound");
  s->add_flag("--optimize", search.optimize,
              "Solve the normalized convex program instead of random rank-one sampling");
  s->add_flag("--no-error", search.no_error, "Ignore sigma; score by the margin B_I - G");
  s->add_option("--trials", search.trials, "Random rank-one draws")->check(CLI::PositiveNumber);
  s->add_option("--seed", search.seed, "Random seed");
  s->add_option("--s-level", search.s_level, "Required violation in standard deviations")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--target-s", search.target_s, "Genuine search target (default: --s-level)")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--C", search.C, "Normalization tr(X gxx) + tr(P gpp)")->check(CLI::PositiveNumber);
  s->add_option("--distribution", search.distribution, "Component sampler")
      ->check(CLI::IsMember({"normal", "uniform"}));
  s->add_option("--start-witness", search.start_witness,
                "Starting pair for the gradient searches (file or builtin name)");
  s->add_option("--restarts", search.restarts, "Start budget of the gradient searches")
      ->check(CLI::PositiveNumber);
  s->add_option("--max-iterations", search.max_iterations,
                "Iterations per optimizer stage")
      ->check(CLI::PositiveNumber);
  s->add_option("--threads", search.threads, "Worker threads (default: all cores)")
      ->check(CLI::NonNegativeNumber);
  s->add_flag("--verbose", search.verbose, "Progress on stderr");
  s->add_option("--json", search.json_path, "Write a JSON report here");
  search.ascent.attach(s);

  std::string target, reproduce_json;
  auto* r = app.add_subcommand("reproduce", "Recompute a published result and compare");
  r->add_option("target", target, "table1, ppt4, genuine4 or alt-property")
      ->required()
      ->check(CLI::IsMember(reproduce_targets()));
  r->add_option("--json", reproduce_json, "Write a JSON report here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (b->parsed()) return cmd_bound(bound, out);
    if (c->parsed()) return cmd_check(check, out);
    if (s->parsed()) return cmd_search(search, out, err);
    if (r->parsed()) return cmd_reproduce(target, reproduce_json, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace cvwitness::cli
