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

#include "cvwitness/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace cvwitness {
namespace {

using json = nlohmann::ordered_json;

json matrix_json(const SymMatrix& m) { return json(m.rows()); }

json to_json(const ViolationReport& r) {
  json j;
  j["partition"] = r.partition.to_string();
  j["G"] = r.G;
  j["sigma"] = r.sigma;
  j["bound"] = r.bound;
  j["margin"] = r.margin;
  j["s"] = r.s ? json(*r.s) : json(nullptr);
  j["confidence"] = r.confidence ? json(*r.confidence) : json(nullptr);
  j["converged"] = r.converged;
  if (!r.h.empty()) {
    j["h"] = r.h;
    j["g"] = r.g;
  }
  j["witness"] = {{"n", r.witness.modes()},
                  {"X", matrix_json(r.witness.x)},
                  {"P", matrix_json(r.witness.p)}};
  j["certificate"] = {{"value", r.certificate.value},
                      {"iterations", r.certificate.iterations},
                      {"converged", r.certificate.converged},
                      {"X", matrix_json(r.certificate.certificate_x)},
                      {"P", matrix_json(r.certificate.certificate_p)}};
  return j;
}

std::string fixed(double v, int width) {
  if (std::abs(v) < 5e-6) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%*.5f", width, v);
  return buf;
}

std::string vec(const std::vector<double>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.2f", i ? ", " : "", v[i]);
    out += buf;
  }
  return out + ")";
}

}  // namespace

std::string report_to_json(const ViolationReport& r, int indent) {
  return to_json(r).dump(indent);
}

std::string reports_to_json(const std::vector<ViolationReport>& reports,
                            int indent) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr.dump(indent);
}

std::string genuine_to_json(const GenuineResult& g, int indent) {
  json j;
  j["found"] = g.found;
  j["min_s"] = g.min_s;
  j["restarts"] = g.restarts;
  j["iterations"] = g.iterations;
  j["witness"] = {{"n", g.witness.modes()},
                  {"X", matrix_json(g.witness.x)},
                  {"P", matrix_json(g.witness.p)}};
  json arr = json::array();
  for (const auto& r : g.reports) arr.push_back(to_json(r));
  j["reports"] = std::move(arr);
  return j.dump(indent);
}

std::string format_report_table(const std::vector<ViolationReport>& reports) {
  std::ostringstream os;
  char head[160];
  std::snprintf(head, sizeof head, "%-14s %10s %10s %10s %10s %10s %12s  %s\n",
                "partition", "G", "sigma", "B_I", "margin", "s", "P(s)",
                "h / g");
  os << head;
  for (const auto& r : reports) {
    char part[32];
    std::snprintf(part, sizeof part, "%-14s", r.partition.to_string().c_str());
    os << part << ' ' << fixed(r.G, 10) << ' ' << fixed(r.sigma, 10) << ' '
       << fixed(r.bound, 10) << ' ' << fixed(r.margin, 10) << ' ';
    if (r.s) {
      char conf[32];
      std::snprintf(conf, sizeof conf, "%12.5g", *r.confidence);
      os << fixed(*r.s, 10) << ' ' << conf;
    } else {
      char blank[32];
      std::snprintf(blank, sizeof blank, "%10s %12s", "-", "-");
      os << blank;
    }
    if (!r.h.empty()) os << "  h=" << vec(r.h) << " g=" << vec(r.g);
    os << '\n';
  }
  return os.str();
}

}  // namespace cvwitness
