// kinetic-lab: command line front end for the kinetic library.
//
// Every subcommand writes CSV to stdout (or --out) and exits with status 1 when an invariant
// it checks fails, 2 on bad input.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kinetic/distance.hpp"
#include "kinetic/error.hpp"
#include "kinetic/harness.hpp"
#include "kinetic/kernel.hpp"
#include "kinetic/nonlocal.hpp"
#include "kinetic/parallel.hpp"
#include "kinetic/spectral.hpp"

using namespace kinetic;
using json = nlohmann::json;

namespace {

// Inline JSON or a path to a file holding it.
std::string load_text(const std::string& arg) {
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) return arg;
  std::ifstream in(arg);
  if (!in) throw std::invalid_argument("cannot read '" + arg + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
  }
  return out;
}

// "t,x1..xd,v1..vd"
Point parse_point(const std::string& text) {
  const auto r = parse_list(text);
  if (r.size() < 3 || r.size() % 2 == 0) throw std::invalid_argument("point needs 1 + 2d coordinates: '" + text + "'");
  return Point::from_flat(r, static_cast<int>((r.size() - 1) / 2));
}

Kernel kernel_from_arg(const std::string& arg, int d, double s) {
  const ScalingExponent se(s);
  if (arg == "stable") return Kernel::stable_like(d, se);
  if (arg == "truncated") return Kernel::truncated_stable(d, se, 1.0);
  if (arg == "zero") return Kernel::zero(d, se);
  if (arg == "stable_half" || arg == "stable_double" || arg == "oscillatory_ring") {
    if (d != 1) throw std::invalid_argument("kernel '" + arg + "' is defined for d = 1");
    return sweep_kernel(arg, se);
  }
  return Kernel::from_json(load_text(arg));
}

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw std::invalid_argument("cannot write '" + path + "'");
    os = &file;
  }
};

int cmd_distance(const std::string& a, const std::string& b, double s, double tol, const std::string& out) {
  const Point z1 = parse_point(a), z2 = parse_point(b);
  const ScalingExponent se(s);
  Output o(out);
  auto& os = *o.os;
  os.precision(15);
  os << "kind,value\n";
  bool ok = true;
  for (auto kind : {DistanceKind::left, DistanceKind::right, DistanceKind::scaling, DistanceKind::euclid}) {
    const double v = dist(kind, z1, z2, se, tol);
    ok = ok && std::isfinite(v) && v >= 0.0;
    os << to_string(kind) << ',' << v << '\n';
  }
  return ok ? 0 : 1;
}

int cmd_kernel_check(const std::string& karg, int d, double s, bool coercivity, const std::string& rings,
                     const std::string& out) {
  const Kernel K = kernel_from_arg(karg, d, s);
  std::vector<double> radii;
  for (int k = -20; k <= 20; ++k) radii.push_back(std::ldexp(1.0, k));
  std::vector<std::vector<double>> dirs;
  for (int i = 0; i < K.d(); ++i) {
    for (double sign : {1.0, -1.0}) {
      std::vector<double> e(K.d(), 0.0);
      e[i] = sign;
      dirs.push_back(e);
    }
  }
  const double Lambda = upper_bound_constant(K, radii);
  // small scales only: truncated kernels lose the lower bound beyond their cutoff
  const std::vector<double> small(radii.begin(), radii.begin() + 21);
  const double lambda = nondegeneracy_constant(K, small, dirs);
  const auto moments = ring_moments(K);
  Output o(out);
  auto& os = *o.os;
  os.precision(12);
  os << "quantity,value\n";
  os << "upper_bound," << Lambda << '\n';
  os << "nondegeneracy_r_le_1," << lambda << '\n';
  os << "ring_upper_bound," << ring_upper_bound(moments, K.s()) << '\n';
  std::vector<double> e1(K.d(), 0.0);
  e1[0] = 1.0;
  os << "symbol_e1," << symbol(K, e1) << '\n';
  bool ok = std::isfinite(Lambda) && lambda > 0.0;
  if (coercivity) {
    const auto table = coercivity_table(K, 1.0, coercivity_family(K.d()));
    for (const auto& [name, r] : table.ratios) os << "coercivity:" << name << ',' << r << '\n';
    os << "coercivity_min," << table.min_ratio << '\n';
    ok = ok && table.min_ratio > 0.0;
  }
  if (!rings.empty()) {
    Output r(rings);
    write_ring_moments_csv(*r.os, moments);
  }
  return ok ? 0 : 1;
}

int cmd_apply(const std::string& karg, int d, double s, const std::string& field, const std::string& poly,
              const std::string& at, double majorant, const std::string& trace, const std::string& out) {
  const Kernel K = kernel_from_arg(karg, d, s);
  const Point z = parse_point(at);
  if (z.d != K.d()) throw std::invalid_argument("point and kernel dimensions differ");
  OperatorOptions opt;
  opt.trace = !trace.empty();
  Majorant omega = Majorant::constant(majorant, K.s());
  PhaseFunction f;
  if (!poly.empty()) {
    const auto p = polynomial_from_json(load_text(poly), K.s(), K.d());
    int vdeg = 0;
    for (const auto& [j, c] : p.terms()) {
      int deg = 0;
      for (int i = 0; i < j.d; ++i) deg += j.jv[i];
      vdeg = std::max(vdeg, deg);
    }
    if (std::isfinite(K.support_radius())) {
      opt.far_radius = std::max(2.0 * opt.split_radius, K.support_radius());
      omega = Majorant::constant(0.0, K.s());
    } else if (vdeg <= 1) {
      opt.tail_model = TailModel::second_difference;
      omega = Majorant::constant(0.0, K.s());
    } else {
      throw DivergenceError("polynomial of velocity degree " + std::to_string(vdeg) +
                            " against a kernel with unbounded support");
    }
    f = [p](const Point& q) { return p.eval(q); };
  } else if (field == "cos_v") {
    f = [](const Point& q) { return std::cos(q.v[0]); };
  } else if (field == "cos_x_plus_v") {
    f = [](const Point& q) { return std::cos(q.x[0] + q.v[0]); };
  } else if (field == "sin_v") {
    f = [](const Point& q) { return std::sin(q.v[0]); };
  } else {
    throw std::invalid_argument("unknown field '" + field + "' (cos_v, cos_x_plus_v, sin_v or --poly)");
  }
  const auto r = apply_at(K, f, z, {}, omega, opt);
  Output o(out);
  auto& os = *o.os;
  os.precision(15);
  os << "value,near,far,quadrature_error,origin_bound,tail,error_bound\n";
  os << r.value << ',' << r.near << ',' << r.far << ',' << r.quadrature_error << ',' << r.origin_bound << ','
     << r.tail << ',' << r.error_bound() << '\n';
  if (!trace.empty()) {
    Output t(trace);
    write_trace_csv(*t.os, r.trace);
  }
  return std::isfinite(r.value) && std::isfinite(r.error_bound()) ? 0 : 1;
}

std::array<int, kMaxDim> int_array(const json& j, int d) {
  std::array<int, kMaxDim> a{};
  const auto v = j.get<std::vector<int>>();
  if (static_cast<int>(v.size()) != d) throw std::invalid_argument("index vector must have d entries");
  std::copy(v.begin(), v.end(), a.begin());
  return a;
}

int cmd_solve(const std::string& cfg_arg, const std::string& grid, const std::string& out) {
  const json cfg = json::parse(load_text(cfg_arg));
  const int d = cfg.value("d", 1);
  const double s = cfg.at("s").get<double>();
  const double P = cfg.value("v_period", kDefaultVelocityPeriod);
  const json& kj = cfg.at("kernel");
  const Kernel K = kernel_from_arg(kj.is_string() ? kj.get<std::string>() : kj.dump(), d, s);
  SpectralField f0(d, cfg.value("time", 0.0), P);
  for (const auto& m : cfg.at("modes")) {
    const auto c = SpectralField::cosine(d, int_array(m.at("k"), d), int_array(m.at("m"), d),
                                         m.value("amplitude", 1.0), m.value("phase", 0.0), P);
    for (const auto& [key, a] : c.modes()) f0.add(key, a);
  }
  SourceSpec c = SourceSpec::none(d, P);
  if (cfg.contains("source")) {
    for (const auto& m : cfg.at("source")) {
      c.add_cosine(int_array(m.at("m"), d), m.value("amplitude", 1.0), m.value("omega", 0.0), m.value("phase", 0.0));
    }
  }
  SolverOptions opt;
  opt.interpolate_off_lattice = cfg.value("interpolate", false);
  const auto f = solve(f0, K, c, cfg.at("t").get<double>(), opt);
  Output o(out);
  o.os->precision(15);
  if (grid.empty()) {
    f.write_csv(*o.os);
  } else {
    // "x_lo,x_hi,nx,v_lo,v_hi,nv" applied to every component
    const auto g = parse_list(grid);
    if (g.size() != 6) throw std::invalid_argument("--grid needs x_lo,x_hi,nx,v_lo,v_hi,nv");
    PhaseGrid pg{d, {}, {}};
    for (int i = 0; i < d; ++i) {
      pg.x.push_back({g[0], g[1], static_cast<int>(g[2])});
      pg.v.push_back({g[3], g[4], static_cast<int>(g[5])});
    }
    sample_to_grid(f, pg).write_csv(*o.os);
  }
  return f.is_hermitian() ? 0 : 1;
}

void write_svg(const SweepReport& rep, const std::string& path) {
  Output o(path);
  auto& os = *o.os;
  const double W = 640, H = 400, pad = 50;
  double lo = 1e300, hi = -1e300, nmin = 1e300, nmax = -1e300;
  for (const auto& r : rep.records) {
    for (const auto& l : r.levels) {
      if (!(l.ratio > 0.0)) continue;
      lo = std::min(lo, std::log10(l.ratio));
      hi = std::max(hi, std::log10(l.ratio));
      nmin = std::min(nmin, std::log2(l.nodes - 1.0));
      nmax = std::max(nmax, std::log2(l.nodes - 1.0));
    }
  }
  if (hi <= lo) hi = lo + 1.0;
  if (nmax <= nmin) nmax = nmin + 1.0;
  auto X = [&](double n) { return pad + (W - 2 * pad) * (std::log2(n - 1.0) - nmin) / (nmax - nmin); };
  auto Y = [&](double r) { return H - pad - (H - 2 * pad) * (std::log10(r) - lo) / (hi - lo); };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">grid nodes per axis (log)</text>\n";
  os << "<text x=\"14\" y=\"" << H / 2 << "\" transform=\"rotate(-90 14 " << H / 2
     << ")\" text-anchor=\"middle\">ratio (log10)</text>\n";
  const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    const auto& r = rep.records[i];
    os << "<polyline fill=\"none\" stroke=\"" << colors[i % 5] << "\" points=\"";
    for (const auto& l : r.levels) {
      if (l.ratio > 0.0) os << X(l.nodes) << ',' << Y(l.ratio) << ' ';
    }
    os << "\"><title>" << r.kernel << " s=" << r.exponents.s << "</title></polyline>\n";
  }
  os << "</svg>\n";
}

int cmd_sweep(const std::string& cfg_arg, const std::string& svg, const std::string& out, bool probe) {
  const HarnessConfig cfg = cfg_arg.empty() ? HarnessConfig{} : HarnessConfig::from_json(load_text(cfg_arg));
  Output o(out);
  if (probe) {
    const auto p = exponent_law_probe(cfg);
    *o.os << "kernel,s,lawful_growth,violated_growth\n";
    for (std::size_t i = 0; i < p.lawful.records.size(); ++i) {
      const auto& r = p.lawful.records[i];
      *o.os << r.kernel << ',' << r.exponents.s << ',' << p.lawful_growth[i] << ',' << p.violated_growth[i] << '\n';
    }
    std::cerr << "violation grows: " << (p.any_violation_grows ? "yes" : "no") << '\n';
    return 0;
  }
  const auto rep = run_schauder_sweep(cfg);
  rep.write_csv(*o.os);
  if (!svg.empty()) write_svg(rep, svg);
  for (const auto& r : rep.records) {
    if (!r.error.empty()) std::cerr << r.kernel << " s=" << r.exponents.s << ": " << r.error << '\n';
  }
  std::cerr << "sweep: " << rep.records.size() << " configurations in " << rep.seconds << " s\n";
  return rep.all_stable() ? 0 : 1;
}

int cmd_liouville(const std::string& poly, const std::string& karg, double s, const std::string& xi_arg,
                  double tol, const std::string& out) {
  const ScalingExponent se(s);
  std::vector<LiouvilleCase> cases;
  if (poly.empty()) {
    cases = liouville_cases(se);
  } else {
    const Point xi = parse_point(xi_arg);
    const Kernel K = kernel_from_arg(karg, xi.d, s);
    cases.push_back({"input", polynomial_from_json(load_text(poly), se, xi.d), K, xi});
  }
  Output o(out);
  auto& os = *o.os;
  os.precision(6);
  os << "case,residual,pass\n";
  bool ok = true;
  for (const auto& c : cases) {
    std::vector<Axis> axes{{-1.0, 0.0, 5}};
    for (int i = 0; i < 2 * c.p.d(); ++i) axes.push_back({-1.0, 1.0, 5});
    const double r = liouville_residual(c.p, c.K, c.xi, axes);
    const bool pass = r <= tol;
    ok = ok && pass;
    os << '"' << c.name << "\"," << r << ',' << (pass ? 1 : 0) << '\n';
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kinetic-lab: kinetic distances, nonlocal operators and Schauder experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out;
  int threads = 0;
  app.add_option("-o,--out", out, "Output file (default stdout)");
  app.add_option("-j,--threads", threads, "Worker threads (0 = hardware)");

  double s = 0.5;
  int d = 1;
  double tol = kDefaultDistanceTol;
  std::string kernel = "stable";

  auto* distance = app.add_subcommand("distance", "Left, right, scaling and Euclidean distances");
  std::string z1, z2;
  distance->add_option("z1", z1, "t,x..,v..")->required();
  distance->add_option("z2", z2, "t,x..,v..")->required();
  distance->add_option("-s", s, "Order parameter in (0,1)");
  distance->add_option("--tol", tol, "Bisection tolerance");

  auto* kcheck = app.add_subcommand("kernel-check", "Upper bound, nondegeneracy, coercivity and ring moments");
  bool coercivity = false;
  std::string rings;
  kcheck->add_option("-k,--kernel", kernel, "stable|truncated|zero|stable_half|stable_double|oscillatory_ring|JSON");
  kcheck->add_option("-s", s);
  kcheck->add_option("-d", d);
  kcheck->add_flag("--coercivity", coercivity, "Also tabulate the coercivity ratios");
  kcheck->add_option("--rings", rings, "Write ring moments CSV (k,mass,second_moment) here");

  auto* apply = app.add_subcommand("apply-op", "L f at a point with its error budget");
  std::string field = "cos_v", poly, at = "0,0,0", trace;
  double majorant = 1.0;
  apply->add_option("-k,--kernel", kernel);
  apply->add_option("-s", s);
  apply->add_option("-d", d);
  apply->add_option("--field", field, "cos_v|cos_x_plus_v|sin_v");
  apply->add_option("--poly", poly, "Polynomial terms as JSON [{\"jt\",\"jx\",\"jv\",\"c\"}]");
  apply->add_option("--at", at, "t,x..,v..");
  apply->add_option("--majorant", majorant, "Constant bound on |f| for the tail");
  apply->add_option("--trace", trace, "Write ring convergence CSV (ring,partial_sum,bound) here");

  auto* solve_cmd = app.add_subcommand("solve", "Spectral solution from a JSON config");
  std::string solve_cfg, grid;
  solve_cmd->add_option("config", solve_cfg, "JSON text or file")->required();
  solve_cmd->add_option("--grid", grid, "x_lo,x_hi,nx,v_lo,v_hi,nv: sample instead of listing modes");

  auto* sweep = app.add_subcommand("sweep", "Schauder ratio sweep");
  std::string sweep_cfg, svg;
  bool probe = false;
  sweep->add_option("config", sweep_cfg, "JSON text or file (default sweep when omitted)");
  sweep->add_option("--svg", svg, "Plot of ratio against refinement");
  sweep->add_flag("--exponent-probe", probe, "Compare the lawful alpha with alpha = gamma");

  auto* liou = app.add_subcommand("liouville", "Residuals of polynomial solutions");
  std::string xi = "-0.5,0.3,0.7";
  double ltol = 1e-8;
  liou->add_option("--poly", poly, "Polynomial JSON; built-in cases when omitted");
  liou->add_option("-k,--kernel", kernel);
  liou->add_option("-s", s);
  liou->add_option("--xi", xi, "Increment t,x..,v.. with t <= 0");
  liou->add_option("--tol", ltol);

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) set_thread_count(static_cast<unsigned>(threads));

  try {
    if (*distance) return cmd_distance(z1, z2, s, tol, out);
    if (*kcheck) return cmd_kernel_check(kernel, d, s, coercivity, rings, out);
    if (*apply) return cmd_apply(kernel, d, s, field, poly, at, majorant, trace, out);
    if (*solve_cmd) return cmd_solve(solve_cfg, grid, out);
    if (*sweep) return cmd_sweep(sweep_cfg, svg, out, probe);
    if (*liou) return cmd_liouville(poly, kernel, s, xi, ltol, out);
  } catch (const std::exception& e) {
    std::cerr << "kinetic-lab: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
