// Acceptance gate: one line per criterion, exit code = number of failures.
// Criterion 10 exercises the CLI binary, whose path arrives as argv[1].
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "exitlab/capacity.hpp"
#include "exitlab/experiments.hpp"
#include "exitlab/kernels.hpp"
#include "exitlab/pde.hpp"
#include "exitlab/sampler.hpp"
#include "exitlab/schlicht.hpp"
#include "exitlab/stats.hpp"

using namespace exitlab;
using geometry::CompactSet;
using geometry::Domain;
using geometry::Point;

namespace {

using Verdict = std::pair<bool, std::string>;

std::string num(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::vector<double> log_grid(double lo, double hi, double factor) {
  std::vector<double> g;
  for (double t = lo; t < hi; t *= factor) g.push_back(t);
  g.push_back(hi);
  return g;
}

std::vector<double> lin_grid(double lo, double hi, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = lo + (hi - lo) * i / double(points - 1);
  return g;
}

Verdict c1_triple_agreement() {
  auto t0 = std::chrono::steady_clock::now();

  pde::SolveOptions opt;
  opt.t_final = 4.0;
  auto field = pde::solve_killed_density(Domain::ball({0, 0}, 1.0),
                                         Point(0.0, 0.0), opt);
  double worst_pde = 0.0;
  for (double t : log_grid(0.05, 4.0, 1.1))
    worst_pde = std::max(
        worst_pde,
        std::fabs(field.survival(t) - kernels::ball_survival_series(t, 1.0, 2)));

  sampler::BatchOptions bo;
  bo.engine = sampler::BatchOptions::Engine::Wos;
  bo.count = 100000;
  bo.seed = 2026;
  bo.threads = 4;
  auto batch = sampler::run_batch(Domain::ball({0, 0}, 1.0), Point(0.0, 0.0), bo);
  std::sort(batch.times.begin(), batch.times.end());
  double n = double(batch.times.size());
  double band = stats::dkw_halfwidth(batch.times.size(), 0.01);
  // exact sup of |F_n - F| over the window, jumps checked on both sides
  double sup = 0.0;
  for (size_t i = 0; i < batch.times.size(); ++i) {
    double t = batch.times[i];
    if (t < 0.05 || t > 4.0) continue;
    double F = 1.0 - kernels::ball_survival_series(t, 1.0, 2);
    sup = std::max({sup, std::fabs(double(i + 1) / n - F),
                    std::fabs(double(i) / n - F)});
  }
  double secs = seconds_since(t0);

  bool ok = worst_pde <= 1e-3 && sup <= band && secs < 120.0;
  return {ok, "pde vs series " + num(worst_pde) + " (<=1e-3), wos sup " +
                  num(sup) + " vs dkw " + num(band) + ", " + num(secs) + "s"};
}

Verdict c2_fundamental_frequency() {
  pde::SolveOptions opt;
  opt.t_final = 6.0;
  auto disk = pde::solve_killed_density(Domain::ball({0, 0}, 1.0),
                                        Point(0.0, 0.0), opt);
  auto grid_d = lin_grid(2.0, 6.0, 33);
  std::vector<double> sv_d(grid_d.size());
  for (size_t i = 0; i < grid_d.size(); ++i) sv_d[i] = disk.survival(grid_d[i]);
  double lam_disk = sampler::fit_lambda_curve(grid_d, sv_d).lambda;

  opt.t_final = 12.0;
  auto strip = pde::solve_killed_density(Domain::strip(M_PI / 4.0),
                                         Point(0.0, 0.0), opt);
  auto grid_s = lin_grid(3.0, 12.0, 37);
  std::vector<double> sv_s(grid_s.size());
  for (size_t i = 0; i < grid_s.size(); ++i) sv_s[i] = strip.survival(grid_s[i]);
  double lam_strip = sampler::fit_lambda_curve(grid_s, sv_s).lambda;

  // effective rate of the half-plane entry from its closed form
  auto hp = harness::schlicht_entry("halfplane");
  auto grid_h = lin_grid(1.0, 10.0, 19);
  std::vector<double> sv_h(grid_h.size());
  for (size_t i = 0; i < grid_h.size(); ++i) sv_h[i] = hp.survival(grid_h[i]);
  double lam_hp = sampler::fit_lambda_curve(grid_h, sv_h).lambda;

  bool ok = std::fabs(lam_disk - 5.7832) <= 0.02 * 5.7832 &&
            std::fabs(lam_strip - 4.0) <= 0.05 * 4.0 && lam_strip < lam_disk &&
            lam_hp < lam_disk;
  return {ok, "lambda disk " + num(lam_disk) + " (5.7832 +-2%), strip " +
                  num(lam_strip) + " (4.0 +-5%), halfplane rate " + num(lam_hp)};
}

Verdict c3_long_stays() {
  auto t0 = std::chrono::steady_clock::now();
  auto hp = harness::verify_long_stay(harness::schlicht_entry("halfplane"), 1.0,
                                      10.0, 19);
  auto st = harness::verify_long_stay(harness::schlicht_entry("strip"), 1.0,
                                      10.0, 19);
  double secs = seconds_since(t0);
  bool head_ok = std::fabs(hp.table.rows[0][1] - 0.38292492) < 5e-4 &&
                 std::fabs(hp.table.rows[0][2] - 0.08888972) < 5e-4;
  bool ok = hp.pass && hp.scalar("crossover_index") == 0.0 && st.pass &&
            st.scalar("crossover_index") == 0.0 && head_ok && secs < 300.0;
  return {ok, "halfplane holds from t=1 (" + num(hp.table.rows[0][1]) + " vs " +
                  num(hp.table.rows[0][2]) + "), strip holds from t=1, " +
                  num(secs) + "s"};
}

Verdict c4_fast_exits() {
  auto res = harness::verify_fast_exit(Domain::ball({0, 0}, 0.5),
                                       Domain::ball({0, 0}, 1.0),
                                       {0.2, 0.1, 0.05});
  double lim = res.scalar("extrapolated");

  sampler::BatchOptions bo;
  bo.engine = sampler::BatchOptions::Engine::Wos;
  bo.count = 100000;
  bo.threads = 4;
  bo.seed = 101;
  auto punct = sampler::run_batch(
      Domain::punctured(Domain::ball({0, 0}, 1.0), {Point(0.5, 0.0)}),
      Point(0.0, 0.0), bo);
  bo.seed = 102;
  auto plain = sampler::run_batch(Domain::ball({0, 0}, 1.0), Point(0.0, 0.0), bo);
  auto ks = stats::ks_two_sample(punct.times, plain.times, 0.01);

  bool ok = std::fabs(lim - 0.75) <= 0.15 * 0.75 && !ks.reject;
  return {ok, "extrapolated " + num(lim) + " (0.75 +-15%), puncture control ks " +
                  num(ks.statistic) + " vs " + num(ks.threshold)};
}

Verdict c5_hitting_bound() {
  auto t0 = std::chrono::steady_clock::now();
  auto res = harness::verify_lemma1(CompactSet::closed_ball({0.5, 0.0}, 0.1),
                                    Point(0.4, 0.0), 0.1, 20);
  double secs = seconds_since(t0);
  double worst = 1e300;
  for (const auto& row : res.table.rows)
    worst = std::min(worst, row[1] - row[2]);
  bool ok = res.pass && res.table.rows.size() == 20 && secs < 300.0;
  return {ok, "flux >= C exp(-0.125/t) at 20 points, min slack " + num(worst) +
                  ", " + num(secs) + "s"};
}

Verdict c6_smalltime_rate() {
  pde::SolveOptions opt;
  opt.t_final = 0.25;
  auto field = pde::solve_killed_density(Domain::ball({0, 0}, 1.0),
                                         Point(0.0, 0.0), opt);
  std::vector<double> ts = {0.2, 0.1, 0.05}, ys;
  for (double t : ts) ys.push_back(-2.0 * t * std::log(field.exit_cdf(t)));
  double rate = harness::extrapolate_smalltime(ts, ys);

  bool mono = true;
  double prev = 0.0;
  for (int m = 3; m <= 64; ++m) {
    double r = kernels::mcconnell_rate(m);
    if (!(r > prev && r < 0.5)) mono = false;
    prev = r;
  }
  bool ok = rate >= 0.9 && rate <= 1.1 && mono;
  return {ok, "extrapolated rate " + num(rate) +
                  " in [0.9,1.1], cone rates increasing toward 1/2: " +
                  (mono ? "yes" : "no")};
}

Verdict c7_capacity_suite() {
  auto disk = capacity::energy_capacity(CompactSet::closed_ball({0, 0}, 0.25), 512);
  auto seg =
      capacity::energy_capacity(CompactSet::segment({-2, 0}, {2, 0}), 512);
  auto ball3 =
      capacity::energy_capacity(CompactSet::closed_ball({0, 0, 0}, 1.0), 1024);

  auto dom = Domain::ball({0, 0}, std::exp(1.0));
  auto k = CompactSet::closed_ball({0, 0}, 1.0);
  auto cond = capacity::dirichlet_condenser(dom, k);
  auto mu = capacity::equilibrium_measure(dom, k, 512);
  double M = mu.total();

  auto pt = sampler::hit_before_exit(Domain::ball({0, 0}, 2.0),
                                     CompactSet::single_point({0.5, 0.0}),
                                     Point(0.0, 0.0), 1000000, 77, 1e-6, 4);
  auto sg = sampler::hit_before_exit(Domain::ball({0, 0}, 2.0),
                                     CompactSet::segment({-0.5, 0}, {0.5, 0}),
                                     Point(0.0, 1.0), 200000, 78, 1e-6, 4);

  bool ok = std::fabs(disk.refined - 0.25) <= 0.01 * 0.25 &&
            std::fabs(seg.refined - 1.0) <= 0.02 &&
            std::fabs(ball3.refined - 1.0) <= 0.02 &&
            std::fabs(cond.refined - 2.0 * M_PI) <= 0.01 * 2.0 * M_PI &&
            std::fabs(M - M_PI) <= 0.02 * M_PI &&
            std::fabs(cond.refined - 2.0 * M) <= 0.03 * 2.0 * M &&
            pt.p == 0.0 && sg.p - sg.half_width > 0.0;
  return {ok, "c2(disk .25) " + num(disk.refined) + ", c2(seg L=4) " +
                  num(seg.refined) + ", c3(ball) " + num(ball3.refined) +
                  ", condenser " + num(cond.refined) + " (2pi), mass " +
                  num(M) + " (pi), point hits " + num(pt.p) + "/1e6, segment p " +
                  num(sg.p) + " +- " + num(sg.half_width)};
}

Verdict c8_radial_monotone() {
  int bad = 0;
  for (int n : {2, 3}) {
    pde::RadialOptions ro;
    ro.n = n;
    ro.radius = 1.0;
    ro.cells = 1200;
    ro.t_final = 1.0;
    ro.snapshot_times = {0.05, 0.2, 0.5, 1.0};
    bad += harness::monotone_violations(pde::radial_solve(ro));
  }
  return {bad == 0, "violations above 2h^2 across n=2,3 snapshots: " +
                        std::to_string(bad)};
}

Verdict c9_tail_exponents() {
  auto res = harness::verify_hardy_tails(
      harness::schlicht_entry("sector", M_PI / 2.0),
      harness::schlicht_entry("halfplane"), 200000, 1, 4);
  double hu = res.scalar("h_u"), hw = res.scalar("h_w");
  bool ok = res.pass && std::fabs(hu - 1.0) <= 0.1 &&
            std::fabs(hw - 0.5) <= 0.05 && res.scalar("ratio_growth") >= 5.0;
  return {ok, "sector H " + num(hu) + " (1.0 +-10%), halfplane H " + num(hw) +
                  " (0.5 +-10%), ratio growth " +
                  num(res.scalar("ratio_growth")) + "x"};
}

Verdict c10_reproducibility(const std::string& cli) {
  if (cli.empty()) return {false, "cli path not provided"};
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "exitlab_acceptance";
  fs::create_directories(dir);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  auto run = [&](const std::string& args) {
    std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
  };

  std::ofstream(dir / "sim.json")
      << R"({"domain":{"type":"ball","center":[0,0],"radius":1},)"
      << R"("engine":"wos","count":20000,"param":1e-6,"start":[0,0]})";
  std::ofstream(dir / "hardy.json")
      << R"({"u_entry":"sector","angle_u":1.5707963267948966,)"
      << R"("w_entry":"halfplane","count":20000})";

  std::string sim = (dir / "sim.json").string();
  std::string hardy = (dir / "hardy.json").string();
  std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  std::string c = (dir / "c.csv").string(), d = (dir / "d.csv").string();

  bool rc = run("simulate --config " + sim + " --out " + a +
                " --seed 5 --threads 1") == 0 &&
            run("simulate --config " + sim + " --out " + b +
                " --seed 5 --threads 4") == 0 &&
            run("verify-hardy --config " + hardy + " --out " + c +
                " --seed 1 --threads 1") == 0 &&
            run("verify-hardy --config " + hardy + " --out " + d +
                " --seed 1 --threads 4") == 0;
  bool same_sim = rc && slurp(a) == slurp(b) && !slurp(a).empty();
  bool same_hardy = rc && slurp(c) == slurp(d) && !slurp(c).empty();

  bool ok = rc && same_sim && same_hardy;
  return {ok, std::string("runs ") + (rc ? "ok" : "failed") +
                  ", simulate csv identical across threads: " +
                  (same_sim ? "yes" : "no") + ", verify-hardy: " +
                  (same_hardy ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = argc > 1 ? argv[1] : "";
  struct Row {
    int id;
    const char* what;
    std::function<Verdict()> fn;
  };
  std::vector<Row> rows = {
      {1, "disk exit law triple agreement", c1_triple_agreement},
      {2, "fundamental frequency fits and ordering", c2_fundamental_frequency},
      {3, "long stays beat the disk on [1,10]", c3_long_stays},
      {4, "fast-exit rate and puncture control", c4_fast_exits},
      {5, "hitting-probability lower bound", c5_hitting_bound},
      {6, "small-time exit rate envelope", c6_smalltime_rate},
      {7, "capacity suite", c7_capacity_suite},
      {8, "radial monotonicity of the killed density", c8_radial_monotone},
      {9, "polynomial tail exponents", c9_tail_exponents},
      {10, "reproducibility across thread counts",
       [&cli] { return c10_reproducibility(cli); }},
  };

  int failures = 0;
  for (auto& r : rows) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      auto v = r.fn();
      ok = v.first;
      detail = v.second;
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %2d: %s - %s (%s) [%.1fs]\n", r.id,
                ok ? "PASS" : "FAIL", r.what, detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures)
    std::printf("%d criterion(s) failed\n", failures);
  else
    std::printf("all criteria passed\n");
  return failures;
}
