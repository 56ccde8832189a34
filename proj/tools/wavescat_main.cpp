#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "wavescat/config.hpp"
#include "wavescat/field_io.hpp"

using namespace wavescat;

namespace {

std::string omega_tag(double omega) {
  double k = omega / M_PI;
  std::ostringstream os;
  if (std::abs(k - std::round(k)) < 1e-9)
    os << llround(k) << "pi";
  else
    os << omega;
  return os.str();
}

struct CaseOutcome {
  RunReport afem;
  RunReport fem;       // valid when baseline requested
  double fem_err2 = -1;
  bool has_fem = false;
};

CaseOutcome run_one(const RunConfig& cfg, bool export_fields) {
  CaseSetup setup = build_setup(cfg);
  CaseOutcome out;

  SolveResult afem = solve_helmholtz(setup);
  out.afem = afem.report;

  SolveResult ref;
  if (cfg.with_reference) {
    double h_ref = setup.h_list.back() / 2.0;
    ref = solve_uniform_reference(setup, h_ref, afem.report.t_stop);
    out.afem.err2 = error_l2(afem.U, ref.U, setup.spec.half_width,
                             setup.spec.dim, &setup.spec.scatterer);
  }
  if (cfg.uniform_baseline) {
    SolveResult fem = solve_uniform_reference(
        setup, setup.h_list.back(), afem.report.t_stop, afem.report.m);
    out.fem = fem.report;
    out.has_fem = true;
    if (cfg.with_reference)
      out.fem_err2 = error_l2(fem.U, ref.U, setup.spec.half_width,
                              setup.spec.dim, &setup.spec.scatterer);
  }

  std::filesystem::create_directories(cfg.out_dir);
  const std::string tag = cfg.case_name + "_" + omega_tag(cfg.omega);
  {
    std::ofstream rep(cfg.out_dir + "/report_" + tag + ".txt");
    echo_config(rep, cfg);
    rep << "[result]\n";
    rep << "m = " << out.afem.m << "\n";
    rep << "dt = " << out.afem.dt << "\n";
    rep << "j_stop = " << out.afem.j_stop << "\n";
    rep << "t0 = " << out.afem.t0 << "\n";
    rep << "t_stop = " << out.afem.t_stop << "\n";
    rep << "steps = " << out.afem.steps << "\n";
    rep << "avg_dof = " << out.afem.avg_dof << "\n";
    if (out.afem.err2 >= 0) rep << "err2 = " << out.afem.err2 << "\n";
    rep << "node_counts =";
    for (int64_t c : out.afem.node_counts) rep << " " << c;
    rep << "\n";
    rep << "wall_seconds = " << out.afem.wall_seconds << "  # not reproducible\n";
    if (out.has_fem) {
      rep << "[baseline]\n";
      rep << "n_dof = " << out.fem.avg_dof << "\n";
      if (out.fem_err2 >= 0) rep << "err2 = " << out.fem_err2 << "\n";
      rep << "wall_seconds = " << out.fem.wall_seconds << "  # not reproducible\n";
    }
  }
  if (export_fields) {
    write_field_csv(cfg.out_dir + "/U_" + tag + ".csv", afem.U);
    write_raster(cfg.out_dir + "/U_" + tag + ".raster", afem.U);
    NestedHierarchy hier = setup.make_hierarchy();
    AdaptedMesh finest = uniform_mesh(hier, hier.levels());
    write_mesh_csv(cfg.out_dir + "/mesh_fine_" + tag + ".csv", finest);
    write_level_map(cfg.out_dir + "/levels_" + tag + ".txt", hier,
                    get_parent_elements(finest));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-domain Helmholtz scattering solver on front-tracking meshes"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "run one case or an omega sweep");

  std::string config_path, case_name, omega_str, levels_str, sweep_str;
  RunConfig cfg;
  double t_up = 0, eta0 = 0, eps0 = 0, cfl = 0.9;
  int degree = 2, threads = 1;
  uint64_t seed = 0;
  bool baseline = false, no_reference = false, no_fields = false;
  std::string out_dir = "out";

  run->add_option("--config", config_path, "config file (key=value sections)");
  run->add_option("--case", case_name, "1d_bump | 2d_bump | 2d_point | 2d_trap");
  run->add_option("--omega", omega_str, "angular frequency, literal or Npi");
  run->add_option("--levels", levels_str, "mesh widths, e.g. 1/5,1/50");
  run->add_option("--degree", degree, "polynomial degree");
  run->add_option("--t-up", t_up, "mesh update interval (default pi/omega)");
  run->add_option("--eta0", eta0, "refinement threshold (default omega/100)");
  run->add_option("--eps0", eps0, "stopping threshold (default omega/100)");
  run->add_option("--cfl", cfl, "CFL number");
  run->add_flag("--uniform-baseline", baseline, "also run the classical FEM row");
  run->add_option("--sweep", sweep_str, "e.g. omega=10pi,20pi,40pi");
  run->add_option("--out-dir", out_dir, "artifact directory");
  run->add_option("--threads", threads, "concurrent runs in a sweep");
  run->add_option("--seed", seed, "seed echoed for property-test harnesses");
  run->add_flag("--no-reference", no_reference, "skip the h_K/2 reference run");
  run->add_flag("--no-fields", no_fields, "skip field exports");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) cfg = read_config_file(config_path);
    if (!case_name.empty()) cfg.case_name = case_name;
    if (!omega_str.empty()) cfg.omega = parse_omega(omega_str);
    if (!levels_str.empty()) cfg.h_list = parse_levels(levels_str);
    if (run->count("--degree")) cfg.params.degree = degree;
    if (run->count("--t-up")) cfg.params.t_up = t_up;
    if (run->count("--eta0")) cfg.params.eta0 = eta0;
    if (run->count("--eps0")) cfg.params.eps0 = eps0;
    if (run->count("--cfl")) cfg.params.c_cfl = cfl;
    if (baseline) cfg.uniform_baseline = true;
    if (no_reference) cfg.with_reference = false;
    if (run->count("--out-dir")) cfg.out_dir = out_dir;
    if (run->count("--threads")) cfg.threads = threads;
    if (run->count("--seed")) cfg.seed = seed;
    build_setup(cfg);  // validate before launching
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sweep_str.empty()) {
      CaseOutcome out = run_one(cfg, !no_fields);
      std::cout << "case " << cfg.case_name << " omega " << omega_tag(cfg.omega)
                << ": m=" << out.afem.m << " j_stop=" << out.afem.j_stop
                << " avg_dof=" << out.afem.avg_dof;
      if (out.afem.err2 >= 0) std::cout << " err2=" << out.afem.err2;
      std::cout << "\n";
      if (out.has_fem) {
        std::cout << "  baseline n_dof=" << out.fem.avg_dof;
        if (out.fem_err2 >= 0) std::cout << " err2=" << out.fem_err2;
        std::cout << "\n";
      }
      return 0;
    }
    // sweep: omega=a,b,c
    if (sweep_str.rfind("omega=", 0) != 0) {
      std::cerr << "config error: --sweep expects omega=...\n";
      return 2;
    }
    std::vector<double> omegas;
    {
      std::stringstream ss(sweep_str.substr(6));
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) omegas.push_back(parse_omega(item));
    }
    std::vector<std::future<CaseOutcome>> futs;
    std::vector<CaseOutcome> outs(omegas.size());
    const int workers = std::max(1, cfg.threads);
    for (size_t i = 0; i < omegas.size(); ++i) {
      RunConfig c = cfg;
      c.omega = omegas[i];
      c.h_list.clear();  // per-frequency defaults
      auto job = [c, no_fields] { return run_one(c, !no_fields); };
      if (workers > 1)
        futs.push_back(std::async(std::launch::async, job));
      else
        outs[i] = job();
    }
    std::vector<RunReport> reports;
    for (size_t i = 0; i < omegas.size(); ++i) {
      if (workers > 1) outs[i] = futs[i].get();
      reports.push_back(outs[i].afem);
    }
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream tab(cfg.out_dir + "/growth_" + cfg.case_name + ".csv");
    tab << "omega,avg_dof,ratio,rate,err2\n";
    std::cout << "omega     avg_dof    ratio   rate\n";
    for (const GrowthRow& r : dof_growth_rates(reports)) {
      double err2 = -1;
      for (const auto& o : outs)
        if (o.afem.omega == r.omega) err2 = o.afem.err2;
      tab << r.omega << "," << r.avg_dof << "," << r.ratio << "," << r.rate
          << "," << err2 << "\n";
      std::cout << omega_tag(r.omega) << "  " << r.avg_dof << "  " << r.ratio
                << "  " << r.rate << "\n";
    }
    return 0;
  } catch (const SolveAbort& e) {
    std::cerr << "run aborted: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
