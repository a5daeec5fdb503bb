// dreamnet: experiment runner for the dreaming Hopfield model.
#include "dreamnet/dreamnet.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace dreamnet;

namespace {

struct Common {
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out_dir = "out";
  std::string config;
  bool dry_run = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out-dir", c.out_dir, "output directory");
  app->add_option("--config", c.config, "flat key=value config file");
  app->add_flag("--dry-run", c.dry_run, "print the resolved parameters and exit");
}

ordered_json common_json(const Common& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["out_dir"] = c.out_dir;
  j["config"] = c.config;
  return j;
}

// Shared run scaffolding: dry-run check, manifest before results, digests after.
class Run {
 public:
  Run(const std::string& name, const Common& c, ordered_json params)
      : dir_(c.out_dir), manifest_(name, c.out_dir, c.seed, params), dry_(c.dry_run), params_(std::move(params)) {}

  bool dry() const {
    if (dry_) std::cout << params_.dump(2) << '\n';
    return dry_;
  }
  void begin() { manifest_.begin(); }

  std::ofstream open(const std::string& file) {
    std::ofstream out(dir_ / file);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / file).string());
    files_.push_back(dir_ / file);
    return out;
  }
  void finish() {
    for (const auto& f : files_) manifest_.add_output(f);
    manifest_.finish();
    std::cout << "wrote " << files_.size() << " file(s) and " << manifest_.path().string() << '\n';
  }

 private:
  fs::path dir_;
  RunManifest manifest_;
  bool dry_;
  ordered_json params_;
  std::vector<fs::path> files_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

struct SolverOpts {
  double damping = 0.5;
  double tol = 1e-10;
  int max_iter = 20000;
  int quad_order = 120;

  void add(CLI::App* app) {
    app->add_option("--damping", damping, "fixed-point damping in (0,1]");
    app->add_option("--solver-tol", tol, "fixed-point tolerance");
    app->add_option("--max-iter", max_iter, "fixed-point iteration cap");
    app->add_option("--quad-order", quad_order, "Gauss-Hermite order");
  }
  SolverConfig config() const {
    SolverConfig c;
    c.damping = damping;
    c.tol = tol;
    c.max_iter = max_iter;
    c.quad_order = quad_order;
    c.validate();
    return c;
  }
  void to_json(ordered_json& j) const {
    j["damping"] = damping;
    j["solver_tol"] = tol;
    j["max_iter"] = max_iter;
    j["quad_order"] = quad_order;
  }
};

// ---------------------------------------------------------------- capacity

struct CapacityArgs {
  Common common;
  SolverOpts solver;
  std::string t_grid = "0,0.1,0.5,1,3,5,10,29,100,1000";
  double resolution = 1e-3;
};

int cmd_capacity(const CapacityArgs& a) {
  const auto ts = parse_grid(a.t_grid);
  ordered_json params = common_json(a.common);
  params["t_grid"] = ts;
  params["resolution"] = a.resolution;
  a.solver.to_json(params);
  Run run("capacity", a.common, params);
  if (run.dry()) return 0;
  const SolverConfig cfg = a.solver.config();
  run.begin();

  std::vector<CapacityResult> results(ts.size());
  parallel_for(int(ts.size()), a.common.jobs, [&](int k) { results[k] = critical_capacity(ts[k], cfg, a.resolution); });

  auto csv = run.open("capacity.csv");
  csv << "t,alpha_c\n";
  std::vector<CapacityPoint> pts;
  ordered_json diag = ordered_json::array();
  for (const auto& r : results) {
    csv << fmt(r.t) << ',' << (r.ok ? fmt(r.alpha_c) : "nan") << '\n';
    if (r.ok) pts.push_back({r.t, r.alpha_c});
    ordered_json d;
    d["t"] = r.t;
    d["ok"] = r.ok;
    d["alpha_c"] = r.ok ? ordered_json(r.alpha_c) : ordered_json(nullptr);
    d["boundary"] = to_string(r.boundary);
    d["solves"] = r.solves;
    d["mu"] = r.last.mu;
    d["pi"] = r.last.pi;
    d["delta"] = r.last.delta;
    d["c"] = r.last.c;
    diag.push_back(d);
  }
  csv.close();

  ordered_json fit;
  fit["model"] = "y = t / (t + a)";
  fit["points"] = pts.size();
  try {
    fit["a"] = capacity_sigmoid_fit(pts);
  } catch (const std::exception& e) {
    fit["a"] = nullptr;
    fit["error"] = e.what();
  }
  auto fj = run.open("capacity_fit.json");
  fj << fit.dump(2) << '\n';
  fj.close();
  auto dj = run.open("solver_diagnostics.json");
  dj << diag.dump(2) << '\n';
  dj.close();
  run.finish();
  return 0;
}

// ---------------------------------------------------------------- phase diagram

struct PhaseArgs {
  Common common;
  SolverOpts solver;
  std::string t_values = "0,0.1,1,1000";
  std::string alpha_grid = "0.000001,0.01,0.02,0.04,0.06,0.08,0.1,0.12";
  double t_min = 0.02;
  double t_max = 1.5;
  double t_step = 0.02;
  double refine = 1e-3;
  bool global_boundary = false;
};

int cmd_phase_diagram(const PhaseArgs& a) {
  const auto ts = parse_grid(a.t_values);
  const auto alphas = parse_grid(a.alpha_grid);
  ordered_json params = common_json(a.common);
  params["t"] = ts;
  params["alpha_grid"] = alphas;
  params["temperature_min"] = a.t_min;
  params["temperature_max"] = a.t_max;
  params["temperature_step"] = a.t_step;
  params["refine"] = a.refine;
  params["global_boundary"] = a.global_boundary;
  a.solver.to_json(params);
  Run run("phase-diagram", a.common, params);
  if (run.dry()) return 0;
  const SolverConfig cfg = a.solver.config();
  TemperatureScan scan;
  scan.t_min = a.t_min;
  scan.t_max = a.t_max;
  scan.step = a.t_step;
  scan.refine = a.refine;
  run.begin();

  std::vector<std::vector<BoundaryPoint>> tc(ts.size()), tr(ts.size());
  parallel_for(int(ts.size()), a.common.jobs, [&](int k) {
    tc[k] = tc_line(ts[k], alphas, cfg, scan);
    if (a.global_boundary) tr[k] = tr_line(ts[k], alphas, cfg, scan);
  });
  auto csv = run.open("phase_lines.csv");
  csv << "t,alpha,T_c,T_R,diagnostics\n";
  for (std::size_t k = 0; k < ts.size(); ++k) {
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const auto& c = tc[k][i];
      std::string note = c.note.empty() ? "" : "tc:" + c.note;
      std::string trs = "";
      if (a.global_boundary) {
        const auto& r = tr[k][i];
        trs = r.temperature ? fmt(*r.temperature) : "nan";
        if (!r.note.empty()) note += std::string(note.empty() ? "" : ";") + "tr:" + r.note;
      }
      csv << fmt(ts[k]) << ',' << fmt(alphas[i]) << ',' << (c.temperature ? fmt(*c.temperature) : "nan") << ','
          << trs << ',' << note << '\n';
    }
  }
  csv.close();
  run.finish();
  return 0;
}

// ---------------------------------------------------------------- Monte Carlo

struct McArgs {
  Common common;
  int n = 1000;
  std::string alphas = "0.08";
  std::string t_values = "0,1,1000";
  std::string temperatures = "0.05:1.2:0.05";
  std::string n_list;
  int realizations = 10;
  int burn_in = 1000;
  int measure = 1000;
};

int cmd_mc(const McArgs& a) {
  const auto alphas = parse_grid(a.alphas);
  const auto ts = parse_grid(a.t_values);
  const auto temps = parse_grid(a.temperatures);
  const std::vector<int> ns = a.n_list.empty() ? std::vector<int>{a.n} : parse_int_list(a.n_list);
  ordered_json params = common_json(a.common);
  params["n"] = ns;
  params["alpha"] = alphas;
  params["t"] = ts;
  params["temperatures"] = temps;
  params["realizations"] = a.realizations;
  params["burn_in_sweeps"] = a.burn_in;
  params["measure_sweeps"] = a.measure;
  Run run("mc", a.common, params);
  if (run.dry()) return 0;
  McConfig cfg;
  cfg.seed = a.common.seed;
  cfg.jobs = a.common.jobs;
  cfg.realizations = a.realizations;
  cfg.burn_in_sweeps = a.burn_in;
  cfg.measure_sweeps = a.measure;
  cfg.validate();
  run.begin();
  for (int n : ns) {
    std::vector<ExperimentRecord> all;
    for (double alpha : alphas) {
      const int p = std::max(1, int(std::lround(alpha * n)));
      for (double t : ts) {
        auto recs = retrieval_curve({n, p, t}, temps, cfg);
        all.insert(all.end(), recs.begin(), recs.end());
      }
    }
    auto csv = run.open(a.n_list.empty() ? "retrieval.csv" : "retrieval_N" + std::to_string(n) + ".csv");
    write_retrieval_csv(all, csv);
    for (const auto& r : all)
      if (!r.note.empty()) std::cerr << "note: N=" << n << " T=" << r.temperature << " t=" << r.t << ": " << r.note << '\n';
  }
  run.finish();
  return 0;
}

// ---------------------------------------------------------------- fields and basins

struct ZeroTArgs {
  Common common;
  int n = 1000;
  int p = 50;
  std::string t_values;
  int realizations = 20;
  int evolutions = 20;
  std::string update_mode = "sequential";
};

McConfig zero_t_config(const ZeroTArgs& a) {
  McConfig cfg;
  cfg.zero_temperature = true;
  cfg.seed = a.common.seed;
  cfg.jobs = a.common.jobs;
  cfg.realizations = a.realizations;
  cfg.update_mode = a.update_mode == "parallel" ? UpdateMode::parallel : UpdateMode::sequential;
  cfg.validate();
  return cfg;
}

ordered_json zero_t_json(const ZeroTArgs& a) {
  ordered_json params = common_json(a.common);
  params["n"] = a.n;
  params["p"] = a.p;
  params["t"] = parse_grid(a.t_values);
  params["realizations"] = a.realizations;
  params["evolutions"] = a.evolutions;
  params["update_mode"] = a.update_mode;
  return params;
}

int cmd_fields(const ZeroTArgs& a, int bins) {
  ordered_json params = zero_t_json(a);
  params["bins"] = bins;
  Run run("fields", a.common, params);
  if (run.dry()) return 0;
  const McConfig cfg = zero_t_config(a);
  run.begin();
  std::vector<FieldStats> stats;
  for (double t : parse_grid(a.t_values)) stats.push_back(field_statistics({a.n, a.p, t}, cfg, a.evolutions, bins));
  auto hist = run.open("fields_histogram.csv");
  write_field_histogram_csv(stats, hist);
  hist.close();
  auto summary = run.open("fields_summary.csv");
  write_field_summary_csv(stats, summary);
  summary.close();
  run.finish();
  return 0;
}

int cmd_basins(const ZeroTArgs& a, const std::string& flip_probs) {
  const auto probs = parse_grid(flip_probs);
  ordered_json params = zero_t_json(a);
  params["flip_probs"] = probs;
  Run run("basins", a.common, params);
  if (run.dry()) return 0;
  const McConfig cfg = zero_t_config(a);
  run.begin();
  std::vector<ExperimentRecord> all;
  for (double t : parse_grid(a.t_values)) {
    auto recs = basin_experiment({a.n, a.p, t}, probs, cfg, a.evolutions);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  auto csv = run.open("basins.csv");
  write_basin_csv(all, csv);
  csv.close();
  run.finish();
  return 0;
}

// ---------------------------------------------------------------- dreaming

struct DreamArgs {
  Common common;
  int n = 64;
  int p = 8;
  double epsilon = 0.5;
  int max_cycles = 200;
  double tol = 1e-3;
  int seeds = 1;
  int realizations = 50;
  std::string n_list;
};

int cmd_dream(const DreamArgs& a) {
  ordered_json params = common_json(a.common);
  params["n"] = a.n;
  params["p"] = a.p;
  params["epsilon"] = a.epsilon;
  params["max_cycles"] = a.max_cycles;
  params["tol"] = a.tol;
  params["seeds"] = a.seeds;
  params["realizations"] = a.realizations;
  params["n_list"] = a.n_list.empty() ? std::vector<int>{} : parse_int_list(a.n_list);
  Run run("dream", a.common, params);
  if (run.dry()) return 0;
  DreamSchedule sched{a.epsilon, a.max_cycles, a.tol};
  sched.validate();
  run.begin();

  std::vector<DreamTrace> traces(a.seeds);
  parallel_for(a.seeds, a.common.jobs, [&](int k) {
    const PatternSet ps = generate_patterns(a.n, a.p, derive_seed(a.common.seed, {std::uint64_t(k)}));
    traces[k] = run_dreaming(ps, sched);
  });
  auto summary = run.open("dream_summary.csv");
  summary << "seed_index,cycles,converged,diverged,final_residual\n";
  for (int k = 0; k < a.seeds; ++k) {
    auto out = run.open("dream_trace_s" + std::to_string(k) + ".csv");
    write_trace_csv(traces[k], out);
    summary << k << ',' << traces[k].cycles() << ',' << traces[k].converged << ',' << traces[k].diverged << ','
            << fmt(traces[k].final_residual()) << '\n';
  }
  summary.close();

  if (!a.n_list.empty()) {
    const auto ns = parse_int_list(a.n_list);
    auto csv = run.open("critical_strengths.csv");
    csv << "n,p,critical_epsilon,semenov_epsilon,unbounded\n";
    for (int n : ns) {
      std::vector<double> crit(a.realizations), sem(a.realizations);
      std::vector<char> unbounded(a.realizations, 0);
      parallel_for(a.realizations, a.common.jobs, [&](int r) {
        const PatternSet ps = generate_patterns(n, a.p, derive_seed(a.common.seed, {std::uint64_t(n), std::uint64_t(r), 0xc1ULL}));
        const auto ce = critical_epsilon(correlation_matrix<double>(ps));
        unbounded[r] = !ce;
        crit[r] = ce.value_or(std::numeric_limits<double>::infinity());
        sem[r] = semenov_epsilon(hebbian<double>(ps), n);
      });
      double cm = 0, sm = 0;
      int nu = 0;
      for (int r = 0; r < a.realizations; ++r) {
        cm += crit[r];
        sm += sem[r];
        nu += unbounded[r];
      }
      csv << n << ',' << a.p << ',' << fmt(cm / a.realizations) << ',' << fmt(sm / a.realizations) << ',' << nu << '\n';
    }
    csv.close();
  }
  run.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> raw(argv, argv + argc);
  std::vector<std::string> args;
  try {
    args = merge_config_args(raw);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"dreamnet: dreaming Hopfield networks, mean-field solvers and Monte Carlo experiments"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  CapacityArgs cap;
  auto* c_cap = app.add_subcommand("capacity", "zero-T critical capacity versus sleep extent");
  add_common(c_cap, cap.common);
  cap.solver.add(c_cap);
  c_cap->add_option("--t-grid", cap.t_grid, "sleep extents, comma list or start:stop:step");
  c_cap->add_option("--resolution", cap.resolution, "bisection resolution in alpha");

  PhaseArgs ph;
  auto* c_ph = app.add_subcommand("phase-diagram", "retrieval boundaries T_c(alpha) and T_R(alpha)");
  add_common(c_ph, ph.common);
  ph.solver.add(c_ph);
  c_ph->add_option("--t", ph.t_values, "sleep extents");
  c_ph->add_option("--alpha-grid", ph.alpha_grid, "sorted loads");
  c_ph->add_option("--temperature-min", ph.t_min, "lowest scan temperature");
  c_ph->add_option("--temperature-max", ph.t_max, "highest scan temperature");
  c_ph->add_option("--temperature-step", ph.t_step, "scan step");
  c_ph->add_option("--refine", ph.refine, "bisection resolution in T");
  c_ph->add_flag("--global-boundary", ph.global_boundary, "also trace T_R");

  McArgs mc;
  auto* c_mc = app.add_subcommand("mc", "finite-T Glauber retrieval curves");
  add_common(c_mc, mc.common);
  c_mc->add_option("--n", mc.n, "neurons");
  c_mc->add_option("--alpha", mc.alphas, "loads");
  c_mc->add_option("--t", mc.t_values, "sleep extents");
  c_mc->add_option("--temperatures", mc.temperatures, "temperature grid");
  c_mc->add_option("--n-list", mc.n_list, "finite-size mode: list of N");
  c_mc->add_option("--realizations", mc.realizations, "pattern realizations M");
  c_mc->add_option("--burn-in", mc.burn_in, "burn-in sweeps");
  c_mc->add_option("--measure", mc.measure, "measurement sweeps");

  ZeroTArgs fl;
  fl.t_values = "0,1,2";
  int bins = 80;
  auto* c_fl = app.add_subcommand("fields", "internal field distributions at zero-T fixed points");
  add_common(c_fl, fl.common);
  c_fl->add_option("--n", fl.n, "neurons");
  c_fl->add_option("--p", fl.p, "patterns");
  c_fl->add_option("--t", fl.t_values, "sleep extents");
  c_fl->add_option("--realizations", fl.realizations, "pattern realizations");
  c_fl->add_option("--evolutions", fl.evolutions, "random starts per realization");
  c_fl->add_option("--bins", bins, "histogram bins");
  c_fl->add_option("--update-mode", fl.update_mode, "sequential or parallel")
      ->check(CLI::IsMember({"sequential", "parallel"}));

  ZeroTArgs bs;
  bs.t_values = "0,0.1,1,1000";
  std::string flip_probs = "0:0.5:0.05";
  auto* c_bs = app.add_subcommand("basins", "attraction basins from corrupted patterns");
  add_common(c_bs, bs.common);
  c_bs->add_option("--n", bs.n, "neurons");
  c_bs->add_option("--p", bs.p, "patterns");
  c_bs->add_option("--t", bs.t_values, "sleep extents");
  c_bs->add_option("--flip-probs", flip_probs, "flip probabilities");
  c_bs->add_option("--realizations", bs.realizations, "pattern realizations");
  c_bs->add_option("--evolutions", bs.evolutions, "corruptions per realization");
  c_bs->add_option("--update-mode", bs.update_mode, "sequential or parallel")
      ->check(CLI::IsMember({"sequential", "parallel"}));

  DreamArgs dr;
  auto* c_dr = app.add_subcommand("dream", "discrete unlearning and consolidation");
  add_common(c_dr, dr.common);
  c_dr->add_option("--n", dr.n, "neurons");
  c_dr->add_option("--p", dr.p, "patterns");
  c_dr->add_option("--epsilon", dr.epsilon, "unlearning strength");
  c_dr->add_option("--max-cycles", dr.max_cycles, "cycle cap");
  c_dr->add_option("--tol", dr.tol, "convergence tolerance on ||GC - I||");
  c_dr->add_option("--seeds", dr.seeds, "independent pattern sets to dream");
  c_dr->add_option("--realizations", dr.realizations, "realizations per N for the critical strengths");
  c_dr->add_option("--n-list", dr.n_list, "N values for the critical-strength comparison");

  std::vector<const char*> cargv;
  for (const auto& s : args) cargv.push_back(s.c_str());
  try {
    app.parse(int(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (c_cap->parsed()) return cmd_capacity(cap);
    if (c_ph->parsed()) return cmd_phase_diagram(ph);
    if (c_mc->parsed()) return cmd_mc(mc);
    if (c_fl->parsed()) return cmd_fields(fl, bins);
    if (c_bs->parsed()) return cmd_basins(bs, flip_probs);
    if (c_dr->parsed()) return cmd_dream(dr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
