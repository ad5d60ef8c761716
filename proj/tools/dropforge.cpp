#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "dropforge/hamiltonian.hpp"
#include "dropforge/io.hpp"
#include "dropforge/phase.hpp"
#include "dropforge/series.hpp"
#include "dropforge/singular.hpp"
#include "dropforge/verify.hpp"

namespace {

using namespace dropforge;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  int n = 2;
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  std::string out;
  std::string format;

  IntegratorConfig cfg() const {
    IntegratorConfig c;
    c.rel_tol = rel_tol;
    c.abs_tol = abs_tol;
    c.validate();
    return c;
  }
};

void add_common(CLI::App* sub, Common& c, const std::string& default_format,
                const std::vector<std::string>& formats, bool tolerances = true) {
  sub->add_option("--n", c.n, "dimension n")->capture_default_str()->check(CLI::Range(2, 16));
  if (tolerances) {
    sub->add_option("--rel-tol", c.rel_tol, "relative tolerance")->capture_default_str();
    sub->add_option("--abs-tol", c.abs_tol, "absolute tolerance")->capture_default_str();
  }
  sub->add_option("--out", c.out, "output path (stdout if omitted)");
  c.format = default_format;
  sub->add_option("--format", c.format, "output format")
      ->capture_default_str()
      ->check(CLI::IsMember(formats));
}

// Data goes to --out or stdout; the summary goes wherever the data does not.
class Sink {
 public:
  explicit Sink(const std::string& path) : path_(path) {}
  std::ostream& data() { return path_.empty() ? std::cout : buffer_; }
  std::ostream& summary() { return path_.empty() ? std::cerr : std::cout; }
  void flush() {
    if (path_.empty()) return;
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path_);
    f << buffer_.str();
  }

 private:
  std::string path_;
  std::ostringstream buffer_;
};

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
}

// Summaries are for people; data files keep 17 digits.
std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// expand

struct ExpandArgs {
  Common c;
  int order = 8;
};

int run_expand(const ExpandArgs& a) {
  const FormalSolution fs = expansion_coefficients(ModelParams(a.c.n), a.order);
  Sink sink(a.c.out);
  if (a.c.format == "json") {
    sink.data() << dump_json(expansion_json(fs));
  } else {
    std::ostream& os = sink.data();
    os << "k,R,theta,R_decimal,theta_decimal\n";
    for (std::size_t k = 0; k <= fs.order(); ++k) {
      os << k << ',' << to_string(fs.R[k]) << ',' << to_string(fs.theta[k]) << ','
         << format_double(fs.R[k].convert_to<double>()) << ','
         << format_double(fs.theta[k].convert_to<double>()) << '\n';
    }
  }
  sink.flush();
  return kExitOk;
}

// singular

struct SingularArgs {
  Common c;
  double z_start = 1000.0;
  double z_end = 1.0;
  int seed_order = 4;
};

int run_singular(const SingularArgs& a) {
  SingularSolveSpec spec;
  spec.params = ModelParams(a.c.n);
  spec.Z_start = a.z_start;
  spec.Z_end = a.z_end;
  spec.seed_order = a.seed_order;
  spec.cfg = a.c.cfg();
  spec.validate();
  if (static_cast<std::size_t>(a.seed_order) > kDefaultMaxOrder) {
    throw UsageError("seed order must not exceed " + std::to_string(kDefaultMaxOrder));
  }

  const Trajectory t = singular_solution(spec);
  Sink sink(a.c.out);
  if (a.c.format == "svg") {
    const std::vector<Sample> orig = to_original_samples(t.samples);
    double r_hi = 0.0, z_hi = 0.0;
    std::vector<Vec2> right, left;
    for (const Sample& s : orig) {
      if (s.x > 20.0) continue;
      r_hi = std::max(r_hi, s.y[0]);
      z_hi = std::max(z_hi, s.x);
      right.push_back({s.y[0], -s.x});
      left.push_back({-s.y[0], -s.x});
    }
    SvgDocument svg(-1.1 * r_hi, 1.1 * r_hi, -1.05 * z_hi, 0.0);
    svg.polyline(right, "#1f4e9c");
    svg.polyline(left, "#1f4e9c");
    svg.text({-r_hi, -0.05 * z_hi}, "singular profile, n = " + std::to_string(a.c.n));
    sink.data() << svg.str();
  } else {
    write_csv(sink.data(), trajectory_table(t.samples, spec.params));
  }
  sink.flush();

  double sup_zr = 0.0, sup_th = 0.0;
  for (const Sample& s : t.samples) {
    const DropState d = from_rescaled({s.y[0], s.y[1], s.x});
    if (d.z < 10.0) continue;
    sup_zr = std::max(sup_zr, std::abs(d.z * d.r - 1.0));
    sup_th = std::max(sup_th, std::abs(d.theta));
  }
  std::ostream& os = sink.summary();
  os << "termination: " << to_string(t.termination) << "\n"
     << "samples: " << t.samples.size() << "\n"
     << "end: Z = " << num(t.end.x) << ", R = " << num(t.end.y[0])
     << ", theta = " << num(t.end.y[1]) << "\n"
     << "sup |z r - 1| for z >= 10: " << num(sup_zr) << "\n"
     << "sup |theta| for z >= 10: " << num(sup_th) << "\n";
  return t.termination == Termination::SpanEnd || t.termination == Termination::ThetaBoundary ||
                 t.termination == Termination::RadiusVanish
             ? kExitOk
             : kExitFailure;
}

// drop

struct DropArgs {
  Common c;
  double z0 = 1.0;
  std::vector<double> dr{0.1};
  double z_end = 100.0;
};

int run_drop(const DropArgs& a) {
  if (!(a.z0 > 0.0) || !(a.z_end > a.z0)) throw UsageError("drop needs z-end > z0 > 0");
  const ModelParams p(a.c.n);
  const IntegratorConfig cfg = a.c.cfg();
  const DropState base = singular_state_at_depth(p, a.z0, cfg);
  for (double d : a.dr) {
    if (!(base.r + d > 0.0)) throw UsageError("displacement makes the radius non-positive");
  }

  Sink sink(a.c.out);
  CsvTable table{{"dr", "Z", "R", "theta", "z", "r", "H"}, {}};
  std::vector<std::vector<Vec2>> shapes;
  double r_hi = 0.0, z_hi = 0.0;
  for (double d : a.dr) {
    DropState s = base;
    s.r += d;
    const DropProfile prof = finite_drop_profile(p, s, a.z_end, cfg);
    for (const auto& row : trajectory_table(prof.rescaled, p).rows) {
      std::vector<double> r{d};
      r.insert(r.end(), row.begin(), row.end());
      table.rows.push_back(std::move(r));
    }
    std::vector<Vec2> shape;
    for (const Sample& q : prof.original.samples) {
      shape.push_back({q.y[0], -q.x});
      r_hi = std::max(r_hi, q.y[0]);
      z_hi = std::max(z_hi, q.x);
    }
    shapes.push_back(std::move(shape));

    const std::vector<Crossing> cr = upward_theta_crossings(prof.rescaled, p);
    std::ostream& os = sink.summary();
    os << "dr = " << num(d) << ": termination " << to_string(prof.original.termination)
       << " at z = " << num(prof.original.end.x) << ", theta sign changes "
       << count_theta_sign_changes(prof.original.samples) << ", H at upward crossings:";
    for (const Crossing& c : cr) os << ' ' << num(c.H);
    os << "\n";
  }

  if (a.c.format == "svg") {
    SvgDocument svg(-0.05 * r_hi, 1.1 * r_hi, -1.05 * z_hi, 0.0);
    for (const auto& shape : shapes) svg.polyline(shape, "#1f4e9c");
    svg.text({0.6 * r_hi, -0.05 * z_hi}, "finite drops, n = " + std::to_string(a.c.n));
    sink.data() << svg.str();
  } else {
    write_csv(sink.data(), table);
  }
  sink.flush();
  return kExitOk;
}

// phase

struct PhaseArgs {
  Common c;
  PhaseSpec spec;
};

int run_phase(PhaseArgs a) {
  a.spec.params = ModelParams(a.c.n);
  a.spec.cfg = a.c.cfg();
  a.spec.validate();
  const std::vector<PhaseOrbit> orbits = phase_orbits(a.spec);

  Sink sink(a.c.out);
  if (a.c.format == "csv") {
    CsvTable t{{"seed", "t_index", "R", "theta", "H"}, {}};
    for (std::size_t i = 0; i < orbits.size(); ++i) {
      for (std::size_t j = 0; j < orbits[i].points.size(); ++j) {
        const Vec2& q = orbits[i].points[j];
        t.rows.push_back({static_cast<double>(i), static_cast<double>(j), q[0], q[1],
                          hamiltonian(q[0], q[1], a.spec.params)});
      }
    }
    write_csv(sink.data(), t);
  } else {
    sink.data() << phase_svg(a.spec, orbits);
  }
  sink.flush();

  double worst = 0.0;
  for (const PhaseOrbit& o : orbits) worst = std::max(worst, o.max_H_deviation);
  sink.summary() << "orbits: " << orbits.size() << "\n"
                 << "max |H - H(seed)|: " << num(worst) << "\n";
  return kExitOk;
}

// diverge

struct DivergeArgs {
  Common c;
  double z0 = 10.0;
  double z_end = 200.0;
  std::vector<double> offsets{1e-4};
  std::string component = "theta";
  std::size_t points = 761;
};

int run_diverge(const DivergeArgs& a) {
  for (double o : a.offsets) {
    if (o == 0.0) throw UsageError("offsets must be nonzero");
  }
  if (!(a.z0 > 0.0) || !(a.z_end > a.z0)) throw UsageError("diverge needs z-end > z0 > 0");
  if (a.points < 3) throw UsageError("diverge needs at least 3 grid points");
  const ModelParams p(a.c.n);
  const IntegratorConfig cfg = a.c.cfg();

  Sink sink(a.c.out);
  CsvTable table;
  bool ok = true;
  for (double o : a.offsets) {
    DivergeSpec spec;
    spec.params = p;
    spec.Z0 = a.z0;
    spec.Z_end = a.z_end;
    spec.offset = o;
    spec.offset_in_theta = a.component == "theta";
    spec.grid_points = a.points;
    spec.cfg = cfg;
    const DivergeResult res = diverge_experiment(spec);

    const CsvTable t = diagnostics_table(res.diagnostics, p);
    if (table.header.empty()) {
      table.header = {"offset"};
      table.header.insert(table.header.end(), t.header.begin(), t.header.end());
    }
    for (const auto& row : t.rows) {
      std::vector<double> r{o};
      r.insert(r.end(), row.begin(), row.end());
      table.rows.push_back(std::move(r));
    }

    bool growing = true;
    double prev = -1.0;
    for (const DiffDiagnostics& d : res.diagnostics) {
      if (!(d.Z >= res.threshold_Z)) continue;
      const double norm = std::hypot(d.rho, d.phi);
      growing = growing && norm > prev;
      prev = norm;
    }
    const bool below = res.max_h < 1.0 / p.n();
    ok = ok && below;
    sink.summary() << "offset " << num(o) << ": max h = " << num(res.max_h)
                   << (below ? " < 1/n" : " NOT below 1/n") << ", dh/dZ <= 0 from Z = "
                   << num(res.threshold_Z) << ", |(rho, phi)| "
                   << (growing ? "strictly increasing" : "not monotone") << " past it\n";
  }
  write_csv(sink.data(), table);
  sink.flush();
  return ok ? kExitOk : kExitFailure;
}

// verify

struct VerifyArgs {
  std::vector<int> n_list{2, 3};
  std::string out;
  bool force_failure = false;
};

int run_verify(const VerifyArgs& a) {
  VerifyOptions opts;
  opts.n_list = a.n_list;
  opts.force_failure = a.force_failure;
  const SuiteReport rep = run_suite(opts);
  std::cout << dump_json(report_json(rep, true));

  if (!a.out.empty()) {
    const std::filesystem::path dir(a.out);
    std::filesystem::create_directories(dir);
    for (const DataFile& f : suite_data_files()) write_file(dir / f.name, f.content);
    write_file(dir / "report.json", dump_json(report_json(rep, false)));
  }
  return rep.all_passed() ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pendent drop profiles: formal expansions, singular solutions, phase portraits"};
  app.require_subcommand(1);

  ExpandArgs ex;
  auto* expand = app.add_subcommand("expand", "coefficients of the formal solution");
  add_common(expand, ex.c, "csv", {"csv", "json"}, false);
  expand->add_option("--order", ex.order, "truncation order K")
      ->capture_default_str()
      ->check(CLI::Range(0, static_cast<int>(kDefaultMaxOrder)));

  SingularArgs sg;
  auto* singular = app.add_subcommand("singular", "singular solution profile");
  add_common(singular, sg.c, "csv", {"csv", "svg"});
  singular->add_option("--z-start", sg.z_start, "seed depth Z")->capture_default_str();
  singular->add_option("--z-end", sg.z_end, "final depth Z")->capture_default_str();
  singular->add_option("--seed-order", sg.seed_order, "expansion order of the seed")
      ->capture_default_str();

  DropArgs dr;
  auto* drop = app.add_subcommand("drop", "finite drops displaced from the singular solution");
  add_common(drop, dr.c, "csv", {"csv", "svg"});
  drop->add_option("--z0", dr.z0, "starting depth z")->capture_default_str();
  drop->add_option("--dr", dr.dr, "radial displacements")->capture_default_str()->delimiter(',');
  drop->add_option("--z-end", dr.z_end, "maximum depth z")->capture_default_str();

  PhaseArgs ph;
  auto* phase = app.add_subcommand("phase", "phase portrait of the limit system");
  add_common(phase, ph.c, "svg", {"svg", "csv"});
  phase->add_option("--r-min", ph.spec.R_min, "seed grid lower R")->capture_default_str();
  phase->add_option("--r-max", ph.spec.R_max, "seed grid upper R")->capture_default_str();
  phase->add_option("--theta-min", ph.spec.theta_min, "seed grid lower theta")->capture_default_str();
  phase->add_option("--theta-max", ph.spec.theta_max, "seed grid upper theta")->capture_default_str();
  phase->add_option("--nr", ph.spec.nR, "seeds along R")->capture_default_str();
  phase->add_option("--ntheta", ph.spec.ntheta, "seeds along theta")->capture_default_str();
  phase->add_option("--t-span", ph.spec.t_span, "integration span in t")->capture_default_str();
  phase->add_option("--contours", ph.spec.contour_levels, "number of H level sets")
      ->capture_default_str();

  DivergeArgs dv;
  auto* diverge = app.add_subcommand("diverge", "separation of two solutions near the singular one");
  add_common(diverge, dv.c, "csv", {"csv"});
  diverge->add_option("--z0", dv.z0, "starting depth Z")->capture_default_str();
  diverge->add_option("--z-end", dv.z_end, "final depth Z")->capture_default_str();
  diverge->add_option("--offset", dv.offsets, "offsets applied as -offset and +offset")
      ->capture_default_str()->delimiter(',');
  diverge->add_option("--component", dv.component, "perturbed component")
      ->capture_default_str()
      ->check(CLI::IsMember({"theta", "R"}));
  diverge->add_option("--points", dv.points, "common grid size")->capture_default_str();

  VerifyArgs vf;
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--n", vf.n_list, "dimensions")->capture_default_str()->delimiter(',')->check(CLI::Range(2, 16));
  verify->add_option("--out", vf.out, "directory for the data files");
  // Negative control: perturbs theta_1 so the residual criterion fails.
  verify->add_flag("--force-failure", vf.force_failure)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*expand) return run_expand(ex);
    if (*singular) return run_singular(sg);
    if (*drop) return run_drop(dr);
    if (*phase) return run_phase(ph);
    if (*diverge) return run_diverge(dv);
    if (*verify) return run_verify(vf);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
