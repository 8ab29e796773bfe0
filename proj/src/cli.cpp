#include "exitlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "exitlab/capacity.hpp"
#include "exitlab/config.hpp"
#include "exitlab/experiments.hpp"
#include "exitlab/kernels.hpp"
#include "exitlab/pde.hpp"
#include "exitlab/sampler.hpp"
#include "exitlab/schlicht.hpp"

namespace exitlab::cli {

namespace {

using nlohmann::json;
using config::ConfigError;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& cols,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write output file: " + path);
  for (size_t i = 0; i < cols.size(); ++i)
    out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << fmt(row[i]);
    out << "\n";
  }
}

struct RunContext {
  std::string config_path;
  std::string out_path;
  uint64_t seed = 1;
  int threads = 1;
  bool verbose = false;
  std::chrono::steady_clock::time_point started =
      std::chrono::steady_clock::now();
};

// The manifest carries everything needed to replay the run, plus wall time
// (the one field expected to differ between identical runs).
void write_manifest(const RunContext& ctx, const std::string& subcommand,
                    const json& cfg, std::optional<bool> pass,
                    const json& extra) {
  json m;
  m["subcommand"] = subcommand;
  m["config"] = cfg;
  m["seed"] = ctx.seed;
  m["threads"] = ctx.threads;
  if (pass) m["pass"] = *pass;
  m["detail"] = extra;
  m["wall_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - ctx.started)
          .count();
  std::ofstream out(ctx.out_path + ".manifest.json", std::ios::trunc);
  out << m.dump(2) << "\n";
}

json experiment_detail(const harness::ExperimentResult& r) {
  json d;
  d["name"] = r.name;
  d["criterion"] = r.criterion;
  d["inconclusive"] = r.inconclusive;
  for (const auto& [k, v] : r.scalars) d["scalars"][k] = v;
  d["notes"] = r.notes;
  return d;
}

double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number())
    throw ConfigError(std::string("\"") + key + "\" must be numeric");
  return j[key].get<double>();
}

int finish_experiment(const RunContext& ctx, const std::string& name,
                      const json& cfg, const harness::ExperimentResult& r) {
  write_csv(ctx.out_path, r.table.cols, r.table.rows);
  write_manifest(ctx, name, cfg, r.pass, experiment_detail(r));
  if (ctx.verbose)
    std::fprintf(stderr, "%s: %s\n", name.c_str(), r.pass ? "pass" : "FAIL");
  return r.pass ? 0 : 1;
}

int cmd_simulate(const RunContext& ctx, const json& cfg) {
  config::require_keys(cfg, {"domain", "engine", "count", "param", "start"},
                       "simulate");
  if (!cfg.contains("domain")) throw ConfigError("simulate: missing domain");
  auto dom = config::parse_domain(cfg.at("domain"));
  sampler::BatchOptions bo;
  std::string engine =
      cfg.contains("engine") ? cfg["engine"].get<std::string>() : "wos";
  if (engine == "em") {
    bo.engine = sampler::BatchOptions::Engine::Em;
    bo.param = number_or(cfg, "param", 1e-3);
  } else if (engine == "wos") {
    bo.engine = sampler::BatchOptions::Engine::Wos;
    bo.param = number_or(cfg, "param", 1e-6);
  } else {
    throw ConfigError("simulate: engine must be \"em\" or \"wos\"");
  }
  bo.count = static_cast<size_t>(number_or(cfg, "count", 10000));
  bo.seed = ctx.seed;
  bo.threads = ctx.threads;
  geometry::Point x0 =
      cfg.contains("start") ? config::parse_point(cfg["start"], "simulate")
                            : (dom.dim() == 3 ? geometry::Point(0, 0, 0)
                                              : geometry::Point(0, 0));
  auto batch = sampler::run_batch(dom, x0, bo);

  bool three = dom.dim() == 3;
  std::vector<std::string> cols = {"index", "exit_time", "exit_x", "exit_y"};
  if (three) cols.push_back("exit_z");
  std::vector<std::vector<double>> rows;
  rows.reserve(batch.times.size());
  for (size_t i = 0; i < batch.times.size(); ++i) {
    std::vector<double> row = {double(i), batch.times[i], batch.points[i][0],
                               batch.points[i][1]};
    if (three) row.push_back(batch.points[i][2]);
    rows.push_back(std::move(row));
  }
  write_csv(ctx.out_path, cols, rows);
  json detail;
  detail["engine"] = engine;
  detail["param"] = bo.param;
  detail["failures"] = batch.failures;
  detail["domain"] = batch.domain_id;
  write_manifest(ctx, "simulate", cfg, std::nullopt, detail);
  return 0;
}

int cmd_pde(const RunContext& ctx, const json& cfg) {
  config::require_keys(
      cfg, {"domain", "t_final", "h", "dt", "truncation", "times"}, "pde");
  if (!cfg.contains("domain")) throw ConfigError("pde: missing domain");
  auto dom = config::parse_domain(cfg.at("domain"));
  pde::SolveOptions opt;
  opt.t_final = number_or(cfg, "t_final", 1.0);
  opt.h = number_or(cfg, "h", 0.0);
  opt.dt = number_or(cfg, "dt", 0.0);
  if (cfg.contains("truncation")) opt.truncation = cfg["truncation"].get<double>();
  if (cfg.contains("times")) {
    for (const auto& t : cfg["times"])
      opt.snapshot_times.push_back(t.get<double>());
  } else {
    for (int i = 1; i <= 4; ++i)
      opt.snapshot_times.push_back(opt.t_final * i / 4.0);
  }
  auto field = pde::solve_killed_density(
      dom, dom.dim() == 3 ? geometry::Point(0, 0, 0) : geometry::Point(0, 0),
      opt);

  bool three = dom.dim() == 3;
  std::vector<std::string> cols = {"t", "node_x", "node_y"};
  if (three) cols.push_back("node_z");
  cols.push_back("density");
  std::vector<std::vector<double>> rows;
  if (field.method == pde::KilledHeatField::Method::Radial) {
    // Radial nodes live on the positive x axis; the field is a function of
    // |x| alone.
    for (const auto& [t, vals] : field.radial.snapshots)
      for (size_t i = 0; i < vals.size(); ++i) {
        std::vector<double> row = {t, field.radial.centers[i], 0.0};
        if (three) row.push_back(0.0);
        row.push_back(vals[i]);
        rows.push_back(std::move(row));
      }
  } else {
    for (const auto& [t, vals] : field.grid.snapshots)
      for (size_t i = 0; i < vals.size(); ++i) {
        const auto& p = field.grid.nodes[i];
        std::vector<double> row = {t, p[0], p[1]};
        if (three) row.push_back(p[2]);
        row.push_back(vals[i]);
        rows.push_back(std::move(row));
      }
  }
  write_csv(ctx.out_path, cols, rows);
  json detail;
  detail["conservation_gap"] = field.conservation_gap();
  detail["method"] =
      field.method == pde::KilledHeatField::Method::Radial ? "radial" : "grid";
  for (double t : opt.snapshot_times) {
    detail["survival"].push_back({{"t", t}, {"value", field.survival(t)}});
    detail["exit_cdf"].push_back({{"t", t}, {"value", field.exit_cdf(t)}});
  }
  write_manifest(ctx, "pde", cfg, std::nullopt, detail);
  return 0;
}

int cmd_capacity(const RunContext& ctx, const json& cfg) {
  config::require_keys(cfg, {"mode", "set", "domain", "points", "h"},
                       "capacity");
  std::string mode =
      cfg.contains("mode") ? cfg["mode"].get<std::string>() : "energy";
  if (!cfg.contains("set")) throw ConfigError("capacity: missing set");
  auto k = config::parse_compact(cfg.at("set"));
  json detail;
  std::vector<std::vector<double>> rows;
  if (mode == "energy") {
    auto rep = capacity::energy_capacity(
        k, static_cast<int>(number_or(cfg, "points", 512)));
    rows.push_back({rep.value, rep.refined, double(rep.points), rep.h});
    detail["kind"] = rep.kind;
  } else if (mode == "condenser") {
    if (!cfg.contains("domain")) throw ConfigError("condenser: missing domain");
    auto dom = config::parse_domain(cfg.at("domain"));
    auto rep = capacity::dirichlet_condenser(dom, k, number_or(cfg, "h", 0.0));
    rows.push_back({rep.value, rep.refined, double(rep.points), rep.h});
    detail["kind"] = rep.kind;
  } else if (mode == "equilibrium") {
    if (!cfg.contains("domain"))
      throw ConfigError("equilibrium: missing domain");
    auto dom = config::parse_domain(cfg.at("domain"));
    auto mu = capacity::equilibrium_measure(
        dom, k, static_cast<int>(number_or(cfg, "points", 512)));
    rows.push_back({mu.total(), mu.total(), double(mu.weight.size()), 0.0});
    detail["kind"] = "equilibrium mass";
    json support = json::array();
    for (size_t i = 0; i < mu.weight.size(); ++i) {
      json pt = {mu.support[i][0], mu.support[i][1]};
      if (mu.support[i].n == 3) pt.push_back(mu.support[i][2]);
      support.push_back({{"x", pt}, {"weight", mu.weight[i]}});
    }
    detail["measure"] = support;
  } else {
    throw ConfigError("capacity: unknown mode \"" + mode + "\"");
  }
  write_csv(ctx.out_path, {"value", "refined", "points", "h"}, rows);
  write_manifest(ctx, "capacity", cfg, std::nullopt, detail);
  return 0;
}

int cmd_lambda(const RunContext& ctx, const json& cfg) {
  config::require_keys(cfg, {"domain", "h"}, "lambda");
  if (!cfg.contains("domain")) throw ConfigError("lambda: missing domain");
  auto dom = config::parse_domain(cfg.at("domain"));
  auto res = pde::eigen_lambda(dom, number_or(cfg, "h", 0.0));
  write_csv(ctx.out_path, {"lambda", "unbounded", "h", "residual"},
            {{res.lambda, double(res.unbounded), res.h, res.residual}});
  write_manifest(ctx, "lambda", cfg, std::nullopt, json::object());
  return 0;
}

int cmd_tails(const RunContext& ctx, const json& cfg) {
  config::require_keys(cfg, {"domain", "engine", "count", "window"}, "tails");
  if (!cfg.contains("domain")) throw ConfigError("tails: missing domain");
  auto dom = config::parse_domain(cfg.at("domain"));
  sampler::BatchOptions bo;
  bo.engine = sampler::BatchOptions::Engine::Wos;
  if (cfg.contains("engine") && cfg["engine"].get<std::string>() == "em")
    bo.engine = sampler::BatchOptions::Engine::Em;
  bo.param = bo.engine == sampler::BatchOptions::Engine::Em ? 1e-3 : 1e-6;
  bo.count = static_cast<size_t>(number_or(cfg, "count", 100000));
  bo.seed = ctx.seed;
  bo.threads = ctx.threads;
  auto batch = sampler::run_batch(
      dom, dom.dim() == 3 ? geometry::Point(0, 0, 0) : geometry::Point(0, 0),
      bo);
  auto times = batch.times;
  std::sort(times.begin(), times.end());
  double lo, hi;
  if (cfg.contains("window")) {
    if (!cfg["window"].is_array() || cfg["window"].size() != 2)
      throw ConfigError("tails: window must be [lo, hi]");
    lo = cfg["window"][0].get<double>();
    hi = cfg["window"][1].get<double>();
  } else {
    lo = times[times.size() / 2];
    hi = times[times.size() - 32];
  }
  auto fit = sampler::fit_tail_exponent(times, lo, hi);
  write_csv(ctx.out_path,
            {"exponent", "se", "curvature", "curvature_se", "superpolynomial",
             "window_lo", "window_hi", "points"},
            {{fit.exponent, fit.se, fit.curvature, fit.curvature_se,
              double(fit.superpolynomial), lo, hi, double(fit.points)}});
  json detail;
  detail["failures"] = batch.failures;
  write_manifest(ctx, "tails", cfg, std::nullopt, detail);
  return 0;
}

int cmd_fast_exit(const RunContext& ctx, const json& cfg) {
  config::require_keys(cfg, {"u", "w", "t_grid", "margin", "trunc_u", "trunc_w"},
                       "verify-fast-exit");
  if (!cfg.contains("u") || !cfg.contains("w") || !cfg.contains("t_grid"))
    throw ConfigError("verify-fast-exit: needs u, w, t_grid");
  std::vector<double> grid;
  for (const auto& t : cfg["t_grid"]) grid.push_back(t.get<double>());
  auto r = harness::verify_fast_exit(
      config::parse_domain(cfg.at("u")), config::parse_domain(cfg.at("w")),
      grid, number_or(cfg, "margin", 0.1), number_or(cfg, "trunc_u", 0.0),
      number_or(cfg, "trunc_w", 0.0));
  return finish_experiment(ctx, "verify-fast-exit", cfg, r);
}

int cmd_long_stay(const RunContext& ctx, const json& cfg) {
  config::require_keys(
      cfg, {"entry", "angle", "t_lo", "t_hi", "points", "mc_count"},
      "verify-long-stay");
  if (!cfg.contains("entry"))
    throw ConfigError("verify-long-stay: missing entry");
  auto entry = harness::schlicht_entry(cfg["entry"].get<std::string>(),
                                       number_or(cfg, "angle", 0.0));
  auto r = harness::verify_long_stay(
      entry, number_or(cfg, "t_lo", 1.0), number_or(cfg, "t_hi", 10.0),
      static_cast<int>(number_or(cfg, "points", 19)),
      static_cast<size_t>(number_or(cfg, "mc_count", 200000)), ctx.seed,
      ctx.threads);
  return finish_experiment(ctx, "verify-long-stay", cfg, r);
}

int cmd_lemma1(const RunContext& ctx, const json& cfg) {
  config::require_keys(cfg, {"k", "a", "delta", "points", "h"},
                       "verify-lemma1");
  if (!cfg.contains("k") || !cfg.contains("a") || !cfg.contains("delta"))
    throw ConfigError("verify-lemma1: needs k, a, delta");
  auto r = harness::verify_lemma1(
      config::parse_compact(cfg.at("k")),
      config::parse_point(cfg.at("a"), "verify-lemma1"),
      cfg["delta"].get<double>(),
      static_cast<int>(number_or(cfg, "points", 20)),
      number_or(cfg, "h", 0.0));
  return finish_experiment(ctx, "verify-lemma1", cfg, r);
}

int cmd_hardy(const RunContext& ctx, const json& cfg) {
  config::require_keys(
      cfg, {"u_entry", "w_entry", "angle_u", "angle_w", "count"},
      "verify-hardy");
  if (!cfg.contains("u_entry") || !cfg.contains("w_entry"))
    throw ConfigError("verify-hardy: needs u_entry, w_entry");
  auto u = harness::schlicht_entry(cfg["u_entry"].get<std::string>(),
                                   number_or(cfg, "angle_u", 0.0));
  auto w = harness::schlicht_entry(cfg["w_entry"].get<std::string>(),
                                   number_or(cfg, "angle_w", 0.0));
  auto r = harness::verify_hardy_tails(
      u, w, static_cast<size_t>(number_or(cfg, "count", 200000)), ctx.seed,
      ctx.threads);
  return finish_experiment(ctx, "verify-hardy", cfg, r);
}

int cmd_dump_tables(const RunContext& ctx) {
  json out;
  for (int n : {2, 3}) {
    auto dump = kernels::bessel_dump(n);
    std::string key = n == 2 ? "n2" : "n3";
    out["bessel"][key]["zeros"] = dump.zeros;
    out["bessel"][key]["weights"] = dump.weights;
  }
  std::ofstream f(ctx.out_path, std::ios::trunc);
  if (!f) throw ConfigError("cannot write output file: " + ctx.out_path);
  f << out.dump(2) << "\n";
  write_manifest(ctx, "dump-tables", json::object(), std::nullopt,
                 json::object());
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"first-exit-time library driver"};
  app.require_subcommand(1);

  RunContext ctx;
  struct Sub {
    CLI::App* cmd;
    bool needs_config;
    int (*fn)(const RunContext&, const json&);
  };
  std::vector<Sub> subs;
  auto add = [&](const char* name, const char* desc, bool needs_config,
                 int (*fn)(const RunContext&, const json&)) {
    CLI::App* c = app.add_subcommand(name, desc);
    if (needs_config)
      c->add_option("--config", ctx.config_path, "JSON config")->required();
    c->add_option("--out", ctx.out_path, "output CSV path")->required();
    c->add_option("--seed", ctx.seed, "random seed");
    c->add_option("--threads", ctx.threads, "worker threads");
    c->add_flag("--verbose", ctx.verbose, "chatty stderr");
    subs.push_back({c, needs_config, fn});
    return c;
  };

  add("simulate", "sample exit times", true, cmd_simulate);
  add("pde", "killed heat solve", true, cmd_pde);
  add("capacity", "capacity computations", true, cmd_capacity);
  add("lambda", "principal Dirichlet eigenvalue", true, cmd_lambda);
  add("tails", "tail exponent fit from samples", true, cmd_tails);
  add("verify-fast-exit", "small-time exit-rate comparison", true,
      cmd_fast_exit);
  add("verify-long-stay", "long-stay comparison vs disk", true, cmd_long_stay);
  add("verify-lemma1", "hitting-probability lower bound", true, cmd_lemma1);
  add("verify-hardy", "polynomial tail ordering", true, cmd_hardy);
  add("dump-tables", "dump internal tables as JSON", false,
      [](const RunContext& c, const json&) { return cmd_dump_tables(c); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help exits clean; usage errors are config errors
  }

  try {
    for (const auto& s : subs) {
      if (!s.cmd->parsed()) continue;
      json cfg = json::object();
      if (s.needs_config) cfg = config::load_file(ctx.config_path);
      return s.fn(ctx, cfg);
    }
    return 2;  // no subcommand matched; require_subcommand should prevent this
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace exitlab::cli
