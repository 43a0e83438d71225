// Copyright 2026 The clusterfid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// clusterfid command-line driver.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clusterfid/analytics.hpp"
#include "clusterfid/bounds.hpp"
#include "clusterfid/dense.hpp"
#include "clusterfid/lattice.hpp"
#include "clusterfid/noise.hpp"
#include "clusterfid/settings.hpp"
#include "clusterfid/tableau.hpp"

namespace cf = clusterfid;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string graph;
  std::string noise = "single:0";
  std::string bounds = "F,P0";
  std::string bound;  // settings / detect
  std::string method = "montecarlo";
  std::uint64_t samples = 100000;
  std::uint64_t shots = 1000;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string shots_out;
  std::string kind = "chain";
  std::string sizes;
  std::string ps;
  std::string noise_model = "single";
  double theta = 0.3;
  std::uint64_t kraus_trials = 20;
  unsigned threads = 0;

  json provenance(const std::string& command) const {
    json j{{"command", command}};
    auto put = [&](const char* k, const auto& v) {
      if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::string>) {
        if (!v.empty()) j[k] = v;
      } else {
        j[k] = v;
      }
    };
    put("graph", graph);
    if (command != "sweep") put("noise", noise);
    if (command == "simulate" || command == "sweep" || command == "oracle-check") put("bounds", bounds);
    if (command == "settings" || command == "detect") put("bound", bound);
    if (command == "simulate") put("method", method);
    if (command == "simulate" && method == "shots") put("shots", shots);
    else put("samples", samples);
    if (seed) j["seed"] = *seed;
    if (command == "sweep") {
      put("kind", kind);
      put("sizes", sizes);
      put("ps", ps);
      put("noise_model", noise_model);
    }
    return j;
  }
};

/// Fills fields whose flags were not given from the JSON config file.
void merge_config(CLI::App& sub, RunConfig& c, const std::string& path) {
  if (path.empty()) return;
  std::ifstream is(path);
  if (!is) throw cf::Error(cf::ErrorKind::parse, "cannot open config file " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw cf::Error(cf::ErrorKind::parse, std::string("config JSON: ") + e.what());
  }
  auto take = [&](const char* key, const char* flag, auto& field) {
    if (!j.contains(key)) return;
    auto* opt = sub.get_option_no_throw(flag);
    if (opt && opt->count() > 0) return;
    try {
      using T = std::decay_t<decltype(field)>;
      if constexpr (std::is_same_v<T, std::optional<std::uint64_t>>) field = j.at(key).get<std::uint64_t>();
      else if constexpr (std::is_same_v<T, std::string>) {
        const auto& v = j.at(key);
        if (v.is_array()) {
          std::string s;
          for (const auto& e : v) s += (s.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
          field = s;
        } else {
          field = v.is_string() ? v.get<std::string>() : v.dump();
        }
      } else field = j.at(key).get<T>();
    } catch (const json::exception& e) {
      throw cf::Error(cf::ErrorKind::parse, std::string("config key '") + key + "': " + e.what());
    }
  };
  take("graph", "--graph", c.graph);
  take("noise", "--noise", c.noise);
  take("bounds", "--bounds", c.bounds);
  take("bound", "--bound", c.bound);
  take("method", "--method", c.method);
  take("samples", "--samples", c.samples);
  take("shots", "--shots", c.shots);
  take("seed", "--seed", c.seed);
  take("out", "--out", c.out);
  take("kind", "--kind", c.kind);
  take("sizes", "--sizes", c.sizes);
  take("ps", "--ps", c.ps);
  take("noise_model", "--noise-model", c.noise_model);
  take("theta", "--theta", c.theta);
  take("threads", "--threads", c.threads);
}

std::uint64_t require_seed(const RunConfig& c) {
  if (!c.seed) throw cf::Error(cf::ErrorKind::parse, "--seed is required");
  return *c.seed;
}

cf::ClusterGraph require_graph(const RunConfig& c) {
  if (c.graph.empty()) throw cf::Error(cf::ErrorKind::parse, "--graph is required");
  return cf::parse_graph(c.graph);
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw cf::Error(cf::ErrorKind::parse, "not a number: '" + s + "'");
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& s, T (*conv)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) out.push_back(conv(tok));
  if (out.empty()) throw cf::Error(cf::ErrorKind::parse, "empty list");
  return out;
}

std::size_t parse_size(const std::string& s) {
  const double v = parse_double(s);
  if (v < 0 || v != std::floor(v)) throw cf::Error(cf::ErrorKind::parse, "not a size: '" + s + "'");
  return static_cast<std::size_t>(v);
}

cf::PauliErrorModel build_noise(const std::string& spec, const cf::ClusterGraph& g) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw cf::Error(cf::ErrorKind::parse, "bad noise spec '" + spec + "'");
  const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
  if (kind == "single") return cf::standard_single_depolarizing(g, parse_double(arg));
  if (kind == "pair") return cf::standard_pair_depolarizing(g, parse_double(arg));
  if (kind == "file") {
    std::ifstream is(arg);
    if (!is) throw cf::Error(cf::ErrorKind::parse, "cannot open noise file " + arg);
    try {
      return cf::model_from_json(json::parse(is), g);
    } catch (const json::parse_error& e) {
      throw cf::Error(cf::ErrorKind::parse, std::string("noise file: ") + e.what());
    }
  }
  throw cf::Error(cf::ErrorKind::parse, "unknown noise model '" + kind + "'");
}

/// Writes to --out, or stdout when no path is given.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw cf::Error(cf::ErrorKind::parse, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

// ---------------------------------------------------------------------------

int cmd_settings(const RunConfig& c) {
  const auto g = require_graph(c);
  if (c.bound.empty()) throw cf::Error(cf::ErrorKind::parse, "--bound is required");
  const auto b = cf::parse_bound(c.bound);
  const auto ss = cf::compile(g, b);
  json j = cf::settings_to_json(g, b, ss);
  j["config"] = c.provenance("settings");
  if (!c.out.empty()) {
    Output o(c.out);
    o.stream() << j.dump(1) << '\n';
  }
  std::cout << ss.size() << " settings\n";
  return 0;
}

struct Row {
  cf::BoundEstimate e;
};

void write_results(std::ostream& os, const json& prov, const std::vector<cf::BoundEstimate>& rows) {
  os << "# config: " << prov.dump() << '\n';
  os << "bound,mean,std_error,M,seed\n";
  for (const auto& e : rows)
    os << cf::to_string(e.bound) << ',' << cf::fmt12(e.mean) << ',' << cf::fmt12(e.std_error) << ','
       << e.repetitions << ',' << e.seed << '\n';
}

std::vector<cf::BoundEstimate> analytic(const cf::ClusterGraph& g, const std::string& noise,
                                        const std::vector<cf::BoundId>& bounds) {
  if (!g.is_chain() || noise.rfind("single:", 0) != 0)
    throw cf::Error(cf::ErrorKind::wrong_kind, "analytic method covers single-qubit depolarizing chains only");
  const double p = parse_double(noise.substr(7));
  std::vector<cf::BoundEstimate> out;
  for (auto b : bounds) {
    double v = 0;
    switch (b) {
      case cf::BoundId::F_exact: v = cf::fidelity_closed_form(g.size(), p); break;
      case cf::BoundId::P0: v = cf::p0_closed_form(g.size(), p); break;
      case cf::BoundId::P1D: v = cf::p1d_closed_form(g.size(), p, cf::FarSumConvention::corrected); break;
      default: throw cf::Error(cf::ErrorKind::wrong_kind, "no closed form for " + std::string(cf::to_string(b)));
    }
    out.push_back({b, v, 0.0, 0, 0});
  }
  return out;
}

int cmd_simulate(const RunConfig& c) {
  const auto g = require_graph(c);
  const auto model = build_noise(c.noise, g);
  const auto bounds = cf::parse_bounds(c.bounds);
  for (auto b : bounds) cf::check_compatible(g, b);
  std::vector<cf::BoundEstimate> rows;
  if (c.method == "montecarlo") {
    rows = cf::monte_carlo(g, model, bounds, c.samples, require_seed(c), c.threads);
  } else if (c.method == "shots") {
    const std::uint64_t seed = require_seed(c);
    std::vector<cf::ShotRecord> all;
    for (std::size_t k = 0; k < bounds.size(); ++k) {
      const auto ss = cf::compile(g, bounds[k]);
      const std::uint64_t s = bounds.size() == 1 ? seed : cf::mix64(seed + k);
      auto shots = cf::run_shots(g, model, ss, c.shots, s, c.threads);
      rows.push_back(cf::estimate_from_shots(g, bounds[k], ss, shots, seed));
      if (!c.shots_out.empty()) all.insert(all.end(), shots.begin(), shots.end());
    }
    if (!c.shots_out.empty()) {
      Output o(c.shots_out);
      cf::write_shots(o.stream(), g.size(), all, "config: " + c.provenance("simulate").dump());
    }
  } else if (c.method == "oracle") {
    for (auto b : bounds) rows.push_back({b, cf::exact_bound_expectation(g, model, b), 0.0, 0, c.seed.value_or(0)});
  } else if (c.method == "analytic") {
    rows = analytic(g, c.noise, bounds);
  } else {
    throw cf::Error(cf::ErrorKind::parse, "unknown method '" + c.method + "'");
  }
  Output o(c.out);
  write_results(o.stream(), c.provenance("simulate"), rows);
  return 0;
}

int cmd_sweep(const RunConfig& c) {
  const std::uint64_t seed = require_seed(c);
  const auto sizes = parse_list<std::size_t>(c.sizes, parse_size);
  const auto ps = parse_list<double>(c.ps, parse_double);
  const auto bounds = cf::parse_bounds(c.bounds);
  Output o(c.out);
  auto& os = o.stream();
  os << "# config: " << c.provenance("sweep").dump() << '\n';
  os << "N,p,bound,mean,std_error\n";
  std::uint64_t cell = 0;
  for (std::size_t n : sizes)
    for (double p : ps) {
      const auto g = c.kind == "grid" ? cf::build_grid(n, n) : cf::build_chain(n);
      const auto model = c.noise_model == "pair" ? cf::standard_pair_depolarizing(g, p)
                                                 : cf::standard_single_depolarizing(g, p);
      const auto rows = cf::monte_carlo(g, model, bounds, c.samples, cf::mix64(seed ^ (0x9e37ull * ++cell)), c.threads);
      for (const auto& e : rows)
        os << g.size() << ',' << cf::fmt12(p) << ',' << cf::to_string(e.bound) << ',' << cf::fmt12(e.mean) << ','
           << cf::fmt12(e.std_error) << '\n';
    }
  return 0;
}

int cmd_oracle_check(const RunConfig& c) {
  const auto g = require_graph(c);
  const auto model = build_noise(c.noise, g);
  const auto bounds = cf::parse_bounds(c.bounds);
  const std::uint64_t seed = require_seed(c);
  bool ok = true;
  const auto mc = cf::monte_carlo(g, model, bounds, c.samples, seed, c.threads);
  std::cout << "bound,mc,std_error,exact,sigma\n";
  for (const auto& e : mc) {
    const double exact = cf::exact_bound_expectation(g, model, e.bound);
    const double sigma = e.std_error > 0 ? std::abs(e.mean - exact) / e.std_error : (e.mean == exact ? 0.0 : INFINITY);
    ok &= sigma < 5;
    std::cout << cf::to_string(e.bound) << ',' << cf::fmt12(e.mean) << ',' << cf::fmt12(e.std_error) << ','
              << cf::fmt12(exact) << ',' << cf::fmt12(sigma) << '\n';
  }
  if (g.size() <= cf::kMaxMixedQubits) {
    std::cout << "channel,T,lhs,rhs,flagged\n";
    auto report = [&](const std::string& name, const cf::KrausChannel& ch, const cf::Subset& t) {
      const auto r = cf::coherent_mixture_check(g, ch, t);
      if (!r.edge_flagged) ok &= std::abs(r.lhs - r.rhs) <= 1e-12;
      std::string ts;
      for (auto q : t) ts += (ts.empty() ? "" : "-") + std::to_string(q);
      std::cout << name << ',' << ts << ',' << cf::fmt12(r.lhs) << ',' << cf::fmt12(r.rhs) << ','
                << (r.edge_flagged ? 1 : 0) << '\n';
    };
    const cf::Label mid = static_cast<cf::Label>((g.size() + 1) / 2);
    const auto rot = cf::KrausChannel::single_qubit(mid, std::cos(c.theta), 0, 0, cf::cplx(0, std::sin(c.theta)));
    for (cf::Label i = 1; i <= g.size(); ++i) report("zrot", rot, {i});
    cf::RngStream rng = cf::substream(seed, 0, cf::kDomainKraus);
    std::normal_distribution<double> normal;
    for (std::uint64_t k = 0; k < c.kraus_trials; ++k) {
      std::array<cf::cplx, 4> a;
      double w = 0;
      for (auto& x : a) x = {normal(rng), normal(rng)}, w += std::norm(x);
      for (auto& x : a) x /= std::sqrt(w);
      const cf::Label q = static_cast<cf::Label>(1 + rng() % g.size());
      cf::Subset t;
      for (cf::Label i = 1; i <= g.size(); ++i)
        if (rng() & 1) t.push_back(i);
      if (t.empty()) t.push_back(q);
      report("random" + std::to_string(k), cf::KrausChannel::single_qubit(q, a[0], a[1], a[2], a[3]), t);
    }
  }
  std::cout << (ok ? "oracle-check: ok\n" : "oracle-check: FAILED\n");
  return ok ? 0 : 1;
}

int cmd_detect(const RunConfig& c) {
  const auto g = require_graph(c);
  if (c.bound.empty()) throw cf::Error(cf::ErrorKind::parse, "--bound is required");
  const auto t = cf::detection_table(g, cf::parse_bound(c.bound));
  {
    Output o(c.out);
    o.stream() << "# config: " << c.provenance("detect").dump() << '\n';
    cf::write_detection_csv(o.stream(), t);
  }
  if (!c.out.empty()) {
    auto cls = cf::bulk_classes(t, 2);
    std::cout << "bulk pair classes: " << cls.size() << ", detected fraction "
              << cf::fmt12(cf::bulk_detected_fraction(t, 2)) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster-state fidelity lower bounds: settings, simulation and oracles"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", config_path, "JSON config file (flags win)");
    s->add_option("--graph", cfg.graph, "chain:N or grid:NXxNY");
    s->add_option("--out", cfg.out, "output file (default stdout)");
    s->add_option("--threads", cfg.threads, "worker threads (0 = auto)");
  };
  auto noisy = [&](CLI::App* s) {
    s->add_option("--noise", cfg.noise, "single:p | pair:p | file:PATH");
    s->add_option("--bounds", cfg.bounds, "comma list of F, P0, P1D, P1D_simplified, P2D, P2D_even");
    s->add_option("--samples", cfg.samples, "Monte Carlo repetitions");
    s->add_option("--seed", cfg.seed, "master seed (required)");
  };

  auto* settings = app.add_subcommand("settings", "compile measurement settings for a bound");
  common(settings);
  settings->add_option("--bound", cfg.bound, "bound to compile")->required(false);

  auto* simulate = app.add_subcommand("simulate", "estimate bounds");
  common(simulate);
  noisy(simulate);
  simulate->add_option("--method", cfg.method, "montecarlo | shots | oracle | analytic");
  simulate->add_option("--shots", cfg.shots, "shots per setting (method shots)");
  simulate->add_option("--shots-out", cfg.shots_out, "also write the shot CSV here");

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo over sizes x error rates");
  common(sweep);
  noisy(sweep);
  sweep->add_option("--kind", cfg.kind, "chain | grid (square side lengths)");
  sweep->add_option("--sizes", cfg.sizes, "comma list of sizes");
  sweep->add_option("--ps", cfg.ps, "comma list of error probabilities");
  sweep->add_option("--noise-model", cfg.noise_model, "single | pair");

  auto* oracle = app.add_subcommand("oracle-check", "Monte Carlo against exact oracles");
  common(oracle);
  noisy(oracle);
  oracle->add_option("--theta", cfg.theta, "coherent Z-rotation angle");
  oracle->add_option("--kraus-trials", cfg.kraus_trials, "random single-qubit Kraus channels");

  auto* detect = app.add_subcommand("detect", "local-error detection table");
  common(detect);
  detect->add_option("--bound", cfg.bound, "bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    merge_config(*sub, cfg, config_path);
    const std::string name = sub->get_name();
    if (name == "settings") return cmd_settings(cfg);
    if (name == "simulate") return cmd_simulate(cfg);
    if (name == "sweep") return cmd_sweep(cfg);
    if (name == "oracle-check") return cmd_oracle_check(cfg);
    if (name == "detect") return cmd_detect(cfg);
  } catch (const cf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
