// Command-line front end: simulate / chart / sweep / verify.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tcmap/csv.hpp"
#include "tcmap/experiments.hpp"
#include "tcmap/manifolds.hpp"

namespace fs = std::filesystem;
using namespace tcmap;

namespace {

struct RunConfig {
  double lambda = 0.5;
  double rho = 1.0;
  double delta = 0.1;
  double h = 0.01;
  double eps = -1;  // default rho^2*delta/4
  double c = -1;    // default nu/2
  double omega = calibration::kOmegaExit;
  double half_width = -1;
  std::uint64_t seed = 20250810;
  std::string out = "out";
  std::string format = "csv";
  int threads = 1;

  Params params() const {
    return Params::make(lambda, rho, delta, h, eps, c);
  }
  par::Mode mode() const {
    return threads > 1 ? par::Mode::openmp : par::Mode::serial;
  }
};

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." :
                         path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  f << content;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) grid.push_back(std::stod(cell));
  }
  return grid;
}

void print_config(const RunConfig& cfg) {
  Params p = cfg.params();
  std::cout << "lambda=" << csv::format_double(cfg.lambda) << "\n"
            << "rho=" << csv::format_double(cfg.rho) << "\n"
            << "delta=" << csv::format_double(cfg.delta) << "\n"
            << "h=" << csv::format_double(cfg.h) << "\n"
            << "eps=" << csv::format_double(p.eps) << "\n"
            << "c=" << csv::format_double(p.c) << "\n"
            << "nu=" << csv::format_double(p.nu()) << "\n"
            << "gamma=" << csv::format_double(p.gamma()) << "\n"
            << "omega=" << csv::format_double(cfg.omega) << "\n"
            << "half_width=" << csv::format_double(cfg.half_width) << "\n"
            << "seed=" << cfg.seed << "\n"
            << "out=" << cfg.out << "\n"
            << "format=" << cfg.format << "\n"
            << "threads=" << cfg.threads << "\n";
}

int cmd_simulate(const RunConfig& cfg, double x0, double y0, long n) {
  Params p = cfg.params();
  p.validate(p.lambda == 1);
  Caps caps;
  Trajectory t = iterate({x0, y0, p.eps, p.h}, p,
                         static_cast<std::size_t>(n), nullptr, caps);
  std::string out = csv::schema_row();
  out += "step,x,y,eps,h,branch,flag\n";
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    const State& s = t.states[k];
    std::string flag;
    if (k + 1 == t.states.size()) {
      if (t.stop == StopReason::diverged) flag = "diverged";
      else if (t.stop == StopReason::cap_reached) flag = "cap";
    }
    std::vector<std::string> cells = {
        std::to_string(k),        csv::format_double(s.x),
        csv::format_double(s.y),  csv::format_double(s.eps),
        csv::format_double(s.h),  to_string(classify_branch(s)),
        flag};
    out += csv::join_row(cells);
  }
  write_file(fs::path(cfg.out) / "simulate.csv", out);
  std::cout << "wrote " << (fs::path(cfg.out) / "simulate.csv").string()
            << " (" << t.states.size() << " rows)\n";
  return 0;
}

int cmd_chart(const RunConfig& cfg, const std::string& chart_id,
              const std::string& point_spec, long n) {
  Params p = cfg.params();
  p.validate(p.lambda == 1);
  std::vector<double> q = parse_grid(point_spec);
  if (q.size() != 4)
    throw CLI::ValidationError("--point needs four comma-separated values");

  std::string out = csv::schema_row();
  bool has_product = chart_id != "k2";
  const char* headers[3] = {"step,r1,y1,eps1,h1,conj_residual,invariant_product",
                            "step,x2,y2,r2,h2,conj_residual",
                            "step,r3,y3,eps3,h3,conj_residual,invariant_product"};
  auto norm = [](const State& a, const State& b) {
    auto nd = [](double x, double y) {
      return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)});
    };
    return std::max({nd(a.x, b.x), nd(a.y, b.y), nd(a.eps, b.eps),
                     nd(a.h, b.h)});
  };

  auto run = [&](auto point, auto stepper, const SectionSet& domain,
                 const char* header, auto product) -> int {
    if (!domain.contains(point.coords())) {
      std::cerr << "point lies outside the chart domain " << domain.name
                << "\n";
      return 2;
    }
    out += header;
    out += "\n";
    for (long k = 0; k <= n; ++k) {
      auto c = point.coords();
      std::vector<std::string> cells = {std::to_string(k)};
      for (double v : c) cells.push_back(csv::format_double(v));
      if (k == 0) {
        cells.push_back("0");
        if (has_product) cells.push_back(csv::format_double(product(point)));
      } else {
        auto prev = point;
        point = stepper(point);
        double res = norm(blow_down(point), euler_step(blow_down(prev), p));
        cells.resize(1);
        for (double v : point.coords()) cells.push_back(csv::format_double(v));
        cells.push_back(csv::format_double(res));
        if (has_product) cells.push_back(csv::format_double(product(point)));
      }
      out += csv::join_row(cells);
    }
    write_file(fs::path(cfg.out) / "chart.csv", out);
    std::cout << "wrote " << (fs::path(cfg.out) / "chart.csv").string()
              << "\n";
    return 0;
  };

  if (chart_id == "k1") {
    return run(K1Point{q[0], q[1], q[2], q[3]},
               [&](const K1Point& a) { return step_k1(a, p); }, domain_d1(p),
               headers[0],
               [](const K1Point& a) { return a.eps1 * a.r1 * a.h1; });
  } else if (chart_id == "k2") {
    return run(K2Point{q[0], q[1], q[2], q[3]},
               [&](const K2Point& a) { return step_k2(a, p); }, domain_d2(p),
               headers[1], [](const K2Point&) { return 0.0; });
  } else if (chart_id == "k3") {
    return run(K3Point{q[0], q[1], q[2], q[3]},
               [&](const K3Point& a) { return step_k3(a, p); }, domain_d3(p),
               headers[2],
               [](const K3Point& a) { return a.eps3 * a.r3 * a.h3; });
  }
  throw CLI::ValidationError("--chart must be one of k1, k2, k3");
}

Params params_for_axis(const RunConfig& cfg, SweepSpec::Axis axis, double v) {
  RunConfig c = cfg;
  switch (axis) {
    case SweepSpec::Axis::eps: {
      // couple the chart ceiling to eps so the entry data stay matched
      c.delta = 4 * v / (cfg.rho * cfg.rho);
      c.h = v / 2;
      c.eps = v;
      break;
    }
    case SweepSpec::Axis::h: c.h = v; break;
    case SweepSpec::Axis::delta: c.delta = v; c.eps = -1; break;
    case SweepSpec::Axis::nu: c.h = v / cfg.rho; break;
    case SweepSpec::Axis::lambda: c.lambda = v; break;
  }
  c.c = -1;
  return c.params();
}

int cmd_sweep(const RunConfig& cfg, const std::string& axis_name,
              const std::string& grid_spec, int samples) {
  std::vector<double> grid = parse_grid(grid_spec);
  if (grid.empty()) throw CLI::ValidationError("empty sweep grid");
  SweepSpec::Axis axis;
  if (axis_name == "eps") axis = SweepSpec::Axis::eps;
  else if (axis_name == "h") axis = SweepSpec::Axis::h;
  else if (axis_name == "delta") axis = SweepSpec::Axis::delta;
  else if (axis_name == "nu") axis = SweepSpec::Axis::nu;
  else if (axis_name == "lambda") axis = SweepSpec::Axis::lambda;
  else throw CLI::ValidationError("--axis must be eps, h, delta, nu or lambda");

  std::string out = csv::schema_row();
  out += "axis,value,lambda,delta,nu,eps,h,steps,bound,width_in,width_out,"
         "rate,exit_height,closeness,flag\n";
  std::vector<double> xs_rate, ys_rate, xs_height, ys_height;
  for (double v : grid) {
    std::string flag;
    Params p;
    PassageReport trans;
    ContractionResult contr;
    double exit_height = std::nan(""), closeness = std::nan("");
    try {
      p = params_for_axis(cfg, axis, v);
      p.validate();
      SectionCatalog cat = build_sections(p, cfg.omega);
      contr = contraction_sweep(cat.r1, p, cat, samples);
      trans = pi_1_minus(
          {p.rho, -1 + (cat.r1.bounds[1].hi + 1) / 2, p.delta / 4, p.nu()}, p,
          cat);
      if (p.lambda > 1) {
        PiResult r = pi_e(p.rho * l_minus(p.delta / 4, p.nu(), p.lambda), p);
        exit_height = r.y_at_section;
        closeness = r.distance / (p.h * (p.eps + p.rho * p.rho));
        xs_height.push_back(v);
        ys_height.push_back(exit_height);
      } else if (p.lambda < 1) {
        PiResult r = pi_a(p.rho * l_minus(p.delta / 4, p.nu(), p.lambda), p);
        closeness = r.distance / (p.h * p.eps);
      }
      if (contr.rate > 0 && std::isfinite(contr.rate)) {
        xs_rate.push_back(1 / (p.nu() * p.delta));
        ys_rate.push_back(std::log(contr.rate));
      }
    } catch (const std::exception& e) {
      flag = e.what();
      for (auto& ch : flag)
        if (ch == ',' || ch == '\n') ch = ';';
    }
    std::vector<std::string> cells = {
        axis_name,
        csv::format_double(v),
        csv::format_double(p.lambda),
        csv::format_double(p.delta),
        csv::format_double(p.nu()),
        csv::format_double(p.eps),
        csv::format_double(p.h),
        std::to_string(trans.steps),
        csv::format_double(trans.bound),
        csv::format_double(contr.width_in),
        csv::format_double(contr.width_out),
        csv::format_double(contr.rate),
        csv::format_double(exit_height),
        csv::format_double(closeness),
        flag};
    out += csv::join_row(cells);
  }
  write_file(fs::path(cfg.out) / "sweep.csv", out);

  std::string fits = csv::schema_row();
  fits += "fit,slope,intercept,r_squared,n_points\n";
  auto add_fit = [&](const std::string& name, const FitResult& f) {
    std::vector<std::string> cells = {name, csv::format_double(f.slope),
                                      csv::format_double(f.intercept),
                                      csv::format_double(f.r_squared),
                                      std::to_string(f.n_points)};
    fits += csv::join_row(cells);
  };
  if (xs_height.size() >= 3) {
    FitResult f = scaling_fit(xs_height, ys_height);
    add_fit("exit_height_vs_" + axis_name, f);
    if (cfg.format == "svg")
      svg::write_loglog_plot((fs::path(cfg.out) / "exit_height.svg").string(),
                             xs_height, ys_height, f.slope, f.intercept,
                             "exit height", axis_name, "exit height");
  }
  if (xs_rate.size() >= 2) {
    FitResult f = linear_fit(xs_rate, ys_rate);
    add_fit("log_width_rate_vs_inv_nu_delta", f);
  }
  write_file(fs::path(cfg.out) / "sweep_fits.csv", fits);
  std::cout << "wrote " << (fs::path(cfg.out) / "sweep.csv").string()
            << " and sweep_fits.csv\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  Params p = cfg.params();
  bool canard = p.lambda == 1;
  p.validate(canard);  // exit 2 on violation, before any run

  SuiteConfig sc;
  sc.mode = cfg.mode();
  sc.seed = cfg.seed;
  sc.omega = cfg.omega;
  sc.skip_theorem_rows = canard;
  ClaimReport rep = run_claim_suite(sc);
  write_file(fs::path(cfg.out) / "report.csv", rep.render_csv());
  write_file(fs::path(cfg.out) / "report.txt", rep.render_text());
  std::cout << rep.render_text();
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"explicit-Euler fast-slow transcritical toolkit"};
  app.set_config("--config", "", "flat key=value configuration file");

  RunConfig cfg;
  bool print_cfg = false;
  app.add_option("--lambda", cfg.lambda, "normal-form constant")
      ->envname("TCMAP_LAMBDA")->capture_default_str();
  app.add_option("--rho", cfg.rho, "section abscissa")
      ->envname("TCMAP_RHO")->capture_default_str();
  app.add_option("--delta", cfg.delta, "chart eps ceiling")
      ->envname("TCMAP_DELTA")->capture_default_str();
  app.add_option("--h", cfg.h, "step size")
      ->envname("TCMAP_H")->capture_default_str();
  app.add_option("--eps", cfg.eps,
                 "time-scale separation (default rho^2*delta/4)")
      ->envname("TCMAP_EPS");
  app.add_option("--c", cfg.c, "contraction parameter (default nu/2)")
      ->envname("TCMAP_C");
  app.add_option("--omega", cfg.omega, "exit-window height coefficient")
      ->envname("TCMAP_OMEGA")->capture_default_str();
  app.add_option("--half-width", cfg.half_width,
                 "entry/exit segment half width (default per segment)")
      ->envname("TCMAP_HALF_WIDTH");
  app.add_option("--seed", cfg.seed, "sampling seed (dynamics stay exact)")
      ->envname("TCMAP_SEED")->capture_default_str();
  app.add_option("--out", cfg.out, "output directory")
      ->envname("TCMAP_OUT")->capture_default_str();
  app.add_option("--format", cfg.format, "csv|svg")
      ->envname("TCMAP_FORMAT")->check(CLI::IsMember({"csv", "svg"}))
      ->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads (1 = serial)")
      ->envname("TCMAP_THREADS")->capture_default_str();
  app.add_flag("--print-config", print_cfg, "print the effective settings");

  double x0 = -1, y0 = -1;
  long nsteps = 1000;
  auto* sim = app.add_subcommand("simulate", "iterate the map, write a CSV");
  sim->add_option("--x0", x0, "start x")->capture_default_str();
  sim->add_option("--y0", y0, "start y")->capture_default_str();
  sim->add_option("-n,--steps", nsteps, "step count")->capture_default_str();

  std::string chart_id = "k1", point_spec = "1,-1,0.025,0.01";
  long chart_steps = 1000;
  auto* cha = app.add_subcommand("chart", "iterate a chart map, write a CSV");
  cha->add_option("--chart", chart_id, "k1|k2|k3")->capture_default_str();
  cha->add_option("--point", point_spec, "four comma-separated coordinates")
      ->capture_default_str();
  cha->add_option("-n,--steps", chart_steps, "step count")
      ->capture_default_str();

  std::string axis = "delta", grid_spec;
  int samples = 64;
  auto* swp = app.add_subcommand("sweep", "parameter sweep with fits");
  swp->add_option("--axis", axis, "eps|h|delta|nu|lambda")
      ->capture_default_str();
  swp->add_option("--grid", grid_spec, "comma-separated grid values")
      ->required();
  swp->add_option("--samples", samples, "samples per grid point")
      ->capture_default_str();

  auto* ver = app.add_subcommand("verify", "run the claim suite, write report");

  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  par::set_threads(cfg.threads);
  if (print_cfg) {
    print_config(cfg);
    if (app.get_subcommands().empty()) return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(cfg, x0, y0, nsteps);
    if (cha->parsed()) return cmd_chart(cfg, chart_id, point_spec, chart_steps);
    if (swp->parsed()) return cmd_sweep(cfg, axis, grid_spec, samples);
    if (ver->parsed()) return cmd_verify(cfg);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
