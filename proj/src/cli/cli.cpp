#include "cli.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "config.hpp"
#include "krein/simd.hpp"
#include "suites.hpp"

namespace krein::cli {

namespace fs = std::filesystem;

namespace {

// Bad flags, unknown tolerance names, an occupied output directory.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::vector<std::string> tol;
  std::string grid;
};

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Files are written to <out>.partial-<pid> and renamed into place by commit().
class OutputDir {
 public:
  explicit OutputDir(const std::string& path) : final_(path) {
    if (fs::exists(final_) && !(fs::is_directory(final_) && fs::is_empty(final_)))
      throw UsageError("output directory '" + path + "' exists and is not empty");
    partial_ = final_;
    partial_ += ".partial-" + std::to_string(::getpid());
    fs::remove_all(partial_);
    fs::create_directories(partial_);
  }
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;
  ~OutputDir() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(partial_, ec);
    }
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(partial_ / name, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + (partial_ / name).string());
    files_.push_back(name);
  }
  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  void commit() {
    if (fs::exists(final_)) fs::remove(final_);
    fs::rename(partial_, final_);
    committed_ = true;
  }

  const fs::path& path() const { return final_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path final_, partial_;
  std::vector<std::string> files_;
  bool committed_ = false;
};

Tolerances parse_overrides(const std::vector<std::string>& items) {
  Tolerances t;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--tol expects NAME=VALUE, got '" + item + "'");
    const std::string name = item.substr(0, eq);
    if (!default_tolerances().contains(name)) throw UsageError("unknown tolerance name '" + name + "'");
    try {
      std::size_t used = 0;
      const double v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1 || !(v > 0.0)) throw std::invalid_argument("");
      t[name] = v;
    } catch (const std::logic_error&) {
      throw UsageError("tolerance value for '" + name + "' must be a positive number");
    }
  }
  return t;
}

Json manifest(const std::string& command, const Flags& f, const Tolerances& overrides, const OutputDir& dir) {
  Json m;
  m["command"] = command;
  m["config"] = f.config.empty() ? Json(nullptr) : Json(f.config);
  m["output_directory"] = dir.path().string();
  m["seed"] = f.seed;
  m["grid"] = f.grid.empty() ? Json(nullptr) : Json(f.grid);
  Json tol = Json::object();
  for (const auto& [k, v] : overrides) tol[k] = v;
  m["tolerance_overrides"] = tol;
  m["version"] = KREIN_VERSION;
  m["workers"] = worker_count();
  m["simd"] = simd::isa_name(simd::active_isa());
  Json files = Json::array();
  for (const auto& name : dir.files()) files.push_back(name);
  m["files"] = files;
  return m;
}

void finish(OutputDir& dir, const std::string& command, const Flags& f, const Tolerances& overrides) {
  dir.write_json("manifest.json", manifest(command, f, overrides, dir));
  dir.commit();
}

std::string default_out(const std::string& command) { return "krein-" + command; }

Json check_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  j["residual"] = std::isfinite(c.residual) ? Json(c.residual) : Json(nullptr);
  j["tolerance"] = c.tolerance;
  j["passed"] = c.passed();
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

void print_check(std::ostream& out, const Check& c) {
  out << (c.passed() ? "PASS " : "FAIL ") << c.name << "  residual=" << format_short(c.residual)
      << "  tolerance=" << format_short(c.tolerance);
  if (!c.passed() && !c.note.empty()) out << "  (" << c.note << ")";
  out << "\n";
}

Json report_json(const std::vector<Check>& checks) {
  Json arr = Json::array();
  bool ok = true;
  for (const Check& c : checks) {
    arr.push_back(check_json(c));
    ok = ok && c.passed();
  }
  return Json{{"passed", ok}, {"checks", arr}};
}

bool all_passed(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed(); });
}

std::vector<double> scan_grid(const Flags& f, double a, double b, int n) {
  if (!f.grid.empty()) {
    const GridSpec g = parse_grid(f.grid);
    return log_grid(g.a, g.b, g.n);
  }
  return log_grid(a, b, n);
}

int cmd_verify(const std::string& scope, const Flags& f, std::ostream& out) {
  SuiteOptions o;
  o.seed = f.seed;
  o.overrides = parse_overrides(f.tol);
  if (!f.config.empty()) {
    const Json j = load_json(f.config);
    if (scope == "points")
      o.points = parse_points(j);
    else if (scope == "curve")
      o.curve = parse_curve(j);
    else if (scope == "dalembert")
      o.dalembert = parse_dalembert(j);
    else
      throw UsageError("--config needs a single model scope (points, curve or dalembert)");
  }
  OutputDir dir(f.out.empty() ? default_out("verify-" + scope) : f.out);

  using Suite = std::vector<Check> (*)(const SuiteOptions&);
  const std::vector<std::pair<std::string, Suite>> all = {
      {"testbed", testbed_suite}, {"points", points_suite}, {"curve", curve_suite}, {"dalembert", dalembert_suite}};
  std::vector<Check> checks;
  Json suites = Json::object();
  for (const auto& [name, suite] : all) {
    if (scope != "all" && scope != name) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<Check> part = suite(o);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const Check& c : part) print_check(out, c);
    out << "suite " << name << ": " << part.size() << " checks in " << format_short(secs) << " s\n";
    suites[name] = report_json(part);
    checks.insert(checks.end(), part.begin(), part.end());
  }
  const bool ok = all_passed(checks);
  Json report = report_json(checks);
  report["scope"] = scope;
  report["seed"] = f.seed;
  report["suites"] = suites;
  dir.write_json("report.json", report);
  finish(dir, "verify " + scope, f, o.overrides);
  out << (ok ? "verify " + scope + ": all " : "verify " + scope + ": FAILED, ") << checks.size()
      << " checks, report in " << dir.path().string() << "/report.json\n";
  return ok ? exit_pass : exit_identity_failure;
}

int cmd_points(const std::string& sub, const Flags& f, std::ostream& out) {
  if (f.config.empty()) throw UsageError("points " + sub + " needs --config");
  const PointsInput in = parse_points(load_json(f.config));
  const Tolerances none;
  OutputDir dir(f.out.empty() ? default_out("points-" + sub) : f.out);

  if (sub == "bound-states") {
    double a = in.a, b = in.b;
    int n = in.resolution;
    if (!f.grid.empty()) {
      const GridSpec g = parse_grid(f.grid);
      a = g.a, b = g.b, n = g.n;
    }
    const points::BoundStateSearch bs = points::bound_states(in.config, a, b, n);
    Json states = Json::array();
    for (const auto& s : bs.states) {
      Json c = Json::array();
      for (Eigen::Index i = 0; i < s.coefficients.size(); ++i) c.push_back(complex_json(s.coefficients(i)));
      states.push_back(
          {{"z_star", s.z_star}, {"energy", s.energy()}, {"coefficients", c}, {"multiplicity", s.multiplicity},
           {"residual", s.residual}});
      out << "bound state z_star=" << format17(s.z_star) << " energy=" << format17(s.energy())
          << " multiplicity=" << s.multiplicity << "\n";
    }
    if (bs.states.empty()) out << "no bound states on [" << a << ", " << b << "]\n";
    for (const auto& w : bs.warnings) out << "warning: " << w << "\n";
    dir.write_json("bound_states.json",
                   {{"interval", {a, b}}, {"resolution", n}, {"states", states}, {"warnings", bs.warnings},
                    {"monotone", bs.monotone}});
  } else if (sub == "kernel") {
    std::string csv = "s,x,y,z,re,im,flag\n";
    int flagged = 0;
    const KernelLine& k = in.kernel;
    for (int i = 0; i < k.samples; ++i) {
      const double s = static_cast<double>(i) / (k.samples - 1);
      const Vec3 x{k.from[0] + s * (k.to[0] - k.from[0]), k.from[1] + s * (k.to[1] - k.from[1]),
                   k.from[2] + s * (k.to[2] - k.from[2])};
      std::string row = format17(s) + "," + format17(x[0]) + "," + format17(x[1]) + "," + format17(x[2]) + ",";
      try {
        const Complex v = points::resolvent_kernel(in.z, in.config, x, k.source);
        row += format17(v.real()) + "," + format17(v.imag()) + ",ok";
      } catch (const GammaSingularError&) {
        row += "nan,nan,gamma_singular";
        ++flagged;
      } catch (const DomainError&) {
        row += "nan,nan,singular";
        ++flagged;
      }
      csv += row + "\n";
    }
    dir.write("kernel.csv", csv);
    out << "kernel: " << k.samples << " samples, " << flagged << " flagged rows\n";
  } else {
    const std::vector<double> grid = scan_grid(f, in.a, in.b, in.resolution);
    const Eigen::Index n = in.config.size();
    std::string csv = "lambda";
    for (Eigen::Index i = 0; i < n; ++i) csv += ",mu_" + std::to_string(i + 1);
    csv += ",invertible\n";
    std::vector<std::string> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      const MatrixXc g = points::gamma_matrix(grid[i], in.config);
      const Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
      std::string row = format17(grid[i]);
      for (Eigen::Index k = 0; k < n; ++k) row += "," + format17(es.eigenvalues()(k));
      rows[i] = row + (invertibility(g).invertible ? ",1" : ",0");
    });
    for (const auto& r : rows) csv += r + "\n";
    dir.write("scan.csv", csv);
    out << "scan: " << grid.size() << " values of lambda\n";
  }
  finish(dir, "points " + sub, f, none);
  return exit_pass;
}

Json roots_json(const curve::CurveBoundStates& bs, bool closed) {
  Json roots = Json::array();
  for (const auto& r : bs.roots) {
    Json v = Json::array();
    for (Eigen::Index i = 0; i < r.eigenvector.size(); ++i) v.push_back(complex_json(r.eigenvector(i)));
    Json j = {{"lambda", r.lambda}, {"multiplicity", r.multiplicity}, {"residual", r.residual}, {"eigenvector", v}};
    if (closed) j["fourier_overlap"] = curve::fourier_mode_overlap(r.eigenvector);
    roots.push_back(j);
  }
  return roots;
}

int cmd_curve(const Flags& f, std::ostream& out) {
  if (f.config.empty()) throw UsageError("curve needs --config");
  const CurveInput in = parse_curve(load_json(f.config));
  const Tolerances none;
  OutputDir dir(f.out.empty() ? default_out("curve") : f.out);
  const curve::CurveModel& c = in.curve;
  const double eps = in.epsilon > 0.0 ? in.epsilon : c.length() / 20.0;

  const std::vector<double> grid = scan_grid(f, in.a, in.b, in.resolution);
  std::string csv = "lambda,min_eigenvalue\n";
  for (const auto& s : curve::curve_spectrum(c, in.beta, grid, eps))
    csv += format17(s.lambda) + "," + format17(s.min_eigenvalue) + "\n";
  dir.write("spectrum.csv", csv);

  const auto coarse = curve::curve_bound_states(c, in.beta, in.a, in.b, in.resolution, eps);
  const curve::CurveModel fine = in.with_size(2 * c.size());
  const auto refined = curve::curve_bound_states(fine, in.beta, in.a, in.b, in.resolution, eps);
  Json agreement;
  agreement["N"] = fine.size();
  Json fine_roots = Json::array();
  for (const auto& r : refined.roots) fine_roots.push_back(r.lambda);
  agreement["roots"] = fine_roots;
  const double tol = default_tolerances().at("curve.root_refinement");
  if (coarse.roots.size() == refined.roots.size() && !coarse.roots.empty()) {
    double worst = 0.0;
    for (std::size_t i = 0; i < coarse.roots.size(); ++i)
      worst = std::max(worst, std::abs(coarse.roots[i].lambda - refined.roots[i].lambda) / refined.roots[i].lambda);
    agreement["max_relative_difference"] = worst;
    agreement["agrees"] = worst < tol;
  } else {
    agreement["max_relative_difference"] = nullptr;
    agreement["agrees"] = coarse.roots.empty() && refined.roots.empty();
  }
  agreement["tolerance"] = tol;
  dir.write_json("roots.json", {{"N", c.size()},
                                {"beta", in.beta},
                                {"epsilon", eps},
                                {"interval", {in.a, in.b}},
                                {"roots", roots_json(coarse, c.closed())},
                                {"warnings", coarse.warnings},
                                {"refinement", agreement}});
  for (const auto& r : coarse.roots)
    out << "root lambda=" << format17(r.lambda) << " multiplicity=" << r.multiplicity << "\n";
  if (coarse.roots.empty()) out << "no roots on [" << in.a << ", " << in.b << "]\n";
  out << "N=" << c.size() << " vs N=" << fine.size() << " agreement: " << agreement["agrees"].dump() << "\n";
  finish(dir, "curve", f, none);
  return exit_pass;
}

int cmd_dalembert(const Flags& f, std::ostream& out) {
  SuiteOptions o;
  o.overrides = parse_overrides(f.tol);
  DalembertInput in;
  if (!f.config.empty()) {
    in = parse_dalembert(load_json(f.config));
  } else {
    in.line = dalembert::LineConfig({0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, 0.5);
    in.data = default_line_data();
  }
  o.dalembert = in;
  OutputDir dir(f.out.empty() ? default_out("dalembert") : f.out);

  const std::vector<Check> checks = dalembert_suite(o);
  for (const Check& c : checks) print_check(out, c);
  dir.write_json("residuals.json", report_json(checks));

  const dalembert::MultiplierGrid grid = in.resolved_grid();
  std::vector<Vec4> pts;
  for (int j = 0; j < grid.size(); ++j) pts.push_back({grid.time(j), in.x[0], in.x[1], in.x[2]});
  const std::vector<Complex> vals = dalembert::line_resolvent(in.z, in.line, in.data, pts);
  std::string csv = "t,re,im\n";
  for (std::size_t j = 0; j < pts.size(); ++j)
    csv += format17(pts[j][0]) + "," + format17(vals[j].real()) + "," + format17(vals[j].imag()) + "\n";
  dir.write("resolvent.csv", csv);
  finish(dir, "dalembert", f, o.overrides);
  const bool ok = all_passed(checks);
  out << "dalembert: " << (ok ? "all residuals within tolerance" : "FAILED") << "\n";
  return ok ? exit_pass : exit_identity_failure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Krein-type resolvent verification and spectra", "krein_cli");
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--config", f.config, "model configuration (JSON)");
    sub->add_option("--out", f.out, "output directory, created atomically");
    sub->add_option("--tol", f.tol, "tolerance override NAME=VALUE")->take_all();
    sub->add_option("--grid", f.grid, "log-spaced lambda grid a:b:n");
    if (with_seed) sub->add_option("--seed", f.seed, "testbed seed");
  };
  std::string scope, sub;
  CLI::App* verify = app.add_subcommand("verify", "run identity suites");
  verify->add_option("scope", scope, "testbed|points|curve|dalembert|all")
      ->required()
      ->check(CLI::IsMember({"testbed", "points", "curve", "dalembert", "all"}));
  common(verify, true);
  CLI::App* pts = app.add_subcommand("points", "point interactions");
  pts->add_option("action", sub, "bound-states|kernel|scan")
      ->required()
      ->check(CLI::IsMember({"bound-states", "kernel", "scan"}));
  common(pts, false);
  CLI::App* crv = app.add_subcommand("curve", "curve-supported perturbation");
  common(crv, false);
  CLI::App* dal = app.add_subcommand("dalembert", "line-supported perturbation of the d'Alembertian");
  common(dal, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_pass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }

  try {
    if (verify->parsed()) return cmd_verify(scope, f, out);
    if (pts->parsed()) return cmd_points(sub, f, out);
    if (crv->parsed()) return cmd_curve(f, out);
    return cmd_dalembert(f, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const KreinError& e) {
    // invalid model parameters (branch cut, epsilon range, self-intersection, ...)
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
}

}  // namespace krein::cli
