#include "kinetic/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "kinetic/error.hpp"
#include "kinetic/parallel.hpp"

namespace kinetic {

namespace {

using json = nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int lattice_index(double xi, double v_period) { return static_cast<int>(std::lround(xi * v_period / kTwoPi)); }

SampledField sample_grid(int d, const std::vector<Axis>& axes, const PhaseFunction& f, std::string meta = {}) {
  GridField g(d, axes);
  std::vector<double> vals(g.size());
  parallel_for(g.size(), [&](std::size_t i) { vals[i] = f(g.point(i)); });
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = vals[i];
  return g.to_sampled(std::move(meta));
}

// Kinetic box of Q_r centred at the origin in d = 1.
std::vector<Axis> box_axes(double r, const ScalingExponent& s, int n, double v_half = -1.0) {
  const double ts = s.two_s();
  const double vh = v_half > 0.0 ? v_half : r;
  return {{-std::pow(r, ts), 0.0, n}, {-std::pow(r, 1.0 + ts), std::pow(r, 1.0 + ts), n}, {-vh, vh, n}};
}

double sup_abs(const SampledField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double holder_norm(const SampledField& f, double alpha, const ScalingExponent& s, std::size_t max_bases) {
  return sup_abs(f) + seminorm(f, default_base_points(f, max_bases), alpha, s).seminorm;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw std::invalid_argument("fit: degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

// D_v^beta of the monomial v^j divided by beta!: binomial(j, beta) v^{j - beta}.
double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

Exponents Exponents::lawful(double s, double gamma) {
  Exponents e{s, gamma, 2.0 * s * gamma / (1.0 + 2.0 * s), 0.0};
  const double lower = std::max(std::floor(2.0 * s + e.alpha) - 2.0 * s, 0.0);
  e.alpha_prime = 0.5 * (lower + e.alpha);
  e.validate();
  return e;
}

void Exponents::validate() const {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("exponents: s must lie in (0,1)");
  if (!(gamma > 0.0 && gamma < std::min(1.0, 2.0 * s))) throw std::invalid_argument("exponents: need 0 < gamma < min(1, 2s)");
  if (!(alpha > 0.0)) throw std::invalid_argument("exponents: alpha must be positive");
  const double fl = std::floor(2.0 * s + alpha);
  if (!(2.0 * s + alpha_prime > fl && alpha_prime < alpha)) {
    throw std::invalid_argument("exponents: alpha' outside floor(2s+alpha) < 2s+alpha' < 2s+alpha");
  }
}

void HarnessConfig::validate() const {
  if (s_values.empty() || kernels.empty()) throw std::invalid_argument("harness: empty sweep");
  if (ladder.size() < 2) throw std::invalid_argument("harness: the refinement ladder needs at least two grids");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 3) throw std::invalid_argument("harness: grids need at least 3 nodes per axis");
    if (i > 0 && ladder[i] <= ladder[i - 1]) throw std::invalid_argument("harness: ladder must increase");
  }
  if (!(gamma_factor > 0.0 && gamma_factor < 1.0)) throw std::invalid_argument("harness: gamma_factor must lie in (0,1)");
  for (double s : s_values) (void)exponents(s);
  for (const auto& k : kernels) (void)sweep_kernel(k, ScalingExponent(s_values.front()));
}

Exponents HarnessConfig::exponents(double s) const {
  Exponents e = Exponents::lawful(s, gamma_factor * std::min(1.0, 2.0 * s));
  if (alpha_override) {
    e.alpha = *alpha_override;
    const double lower = std::max(std::floor(2.0 * s + e.alpha) - 2.0 * s, 0.0);
    e.alpha_prime = 0.5 * (lower + e.alpha);
    e.validate();
  }
  return e;
}

std::string HarnessConfig::to_json() const {
  json j{{"s_values", s_values},   {"gamma_factor", gamma_factor},
         {"kernels", kernels},     {"ladder", ladder},
         {"stability_threshold", stability_threshold},
         {"max_bases", max_bases}, {"seed", seed}};
  if (alpha_override) j["alpha_override"] = *alpha_override;
  return j.dump(2);
}

HarnessConfig HarnessConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("harness config: ") + e.what());
  }
  HarnessConfig c;
  try {
    if (j.contains("s_values")) c.s_values = j.at("s_values").get<std::vector<double>>();
    if (j.contains("gamma_factor")) c.gamma_factor = j.at("gamma_factor").get<double>();
    if (j.contains("kernels")) c.kernels = j.at("kernels").get<std::vector<std::string>>();
    if (j.contains("ladder")) c.ladder = j.at("ladder").get<std::vector<int>>();
    if (j.contains("stability_threshold")) c.stability_threshold = j.at("stability_threshold").get<double>();
    if (j.contains("max_bases")) c.max_bases = j.at("max_bases").get<std::size_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<unsigned>();
    if (j.contains("alpha_override")) c.alpha_override = j.at("alpha_override").get<double>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("harness config: ") + e.what());
  }
  c.validate();
  return c;
}

Kernel sweep_kernel(const std::string& name, const ScalingExponent& s) {
  if (name == "stable") return Kernel::stable_like(1, s);
  if (name == "stable_half") return Kernel::stable_like(1, s, 0.5);
  if (name == "stable_double") return Kernel::stable_like(1, s, 2.0);
  if (name == "truncated") return Kernel::truncated_stable(1, s, 1.0);
  if (name == "oscillatory_ring") {
    const double ts = s.two_s();
    std::map<int, double> masses;
    for (int k = -30; k <= 8; ++k) {
      const double stable = 2.0 * (std::pow(2.0, -ts * (k - 1)) - std::pow(2.0, -ts * k)) / ts;
      masses[k] = (1.0 + 0.5 * ((k % 2 == 0) ? 1.0 : -1.0)) * stable;
    }
    return Kernel::ring_measure(1, s, masses);
  }
  throw std::invalid_argument("unknown sweep kernel '" + name + "'");
}

KineticSolution sweep_solution(const Kernel& K) {
  const double P = kDefaultVelocityPeriod;
  SpectralField f0 = SpectralField::cosine(1, {1}, {lattice_index(1.0, P)});
  const auto second = SpectralField::cosine(1, {0}, {lattice_index(2.0, P)}, 0.5, 0.3);
  for (const auto& [k, a] : second.modes()) f0.add(k, a);
  f0.set_time(-2.0);
  SourceSpec c = SourceSpec::none(1);
  c.add_cosine({lattice_index(1.0, P)}, 0.5, 1.0);
  return KineticSolution(f0, K, c);
}

bool SweepReport::all_stable() const {
  return std::all_of(records.begin(), records.end(), [](const SweepRecord& r) { return r.finite && r.stable; });
}

void SweepReport::write_csv(std::ostream& os) const {
  const auto prec = os.precision(10);
  os << "kernel,s,gamma,alpha,nodes,numerator,slab_norm,source_norm,ratio,relative_change,stable\n";
  for (const auto& r : records) {
    if (r.levels.empty()) {
      os << r.kernel << ',' << r.exponents.s << ',' << r.exponents.gamma << ',' << r.exponents.alpha
         << ",0,nan,nan,nan,nan,nan,0\n";
      continue;
    }
    for (const auto& l : r.levels) {
      os << r.kernel << ',' << r.exponents.s << ',' << r.exponents.gamma << ',' << r.exponents.alpha << ','
         << l.nodes << ',' << l.numerator << ',' << l.slab_norm << ',' << l.source_norm << ',' << l.ratio << ','
         << r.relative_change << ',' << (r.stable ? 1 : 0) << '\n';
    }
  }
  os.precision(prec);
}

SweepReport run_schauder_sweep(const HarnessConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::pair<double, std::string>> jobs;
  for (double s : cfg.s_values) {
    for (const auto& k : cfg.kernels) jobs.emplace_back(s, k);
  }
  SweepReport rep;
  rep.records.resize(jobs.size());
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto& [sv, kname] = jobs[j];
    SweepRecord& rec = rep.records[j];
    rec.kernel = kname;
    rec.exponents = cfg.exponents(sv);
    const ScalingExponent s(sv);
    const Exponents& e = rec.exponents;
    try {
      const Kernel K = sweep_kernel(kname, s);
      const KineticSolution sol = sweep_solution(K);
      auto f = [&sol](const Point& z) { return sol(z); };
      auto c = [&sol](const Point& z) { return sol.source(z); };
      for (int n : cfg.ladder) {
        LevelRecord lv;
        lv.nodes = n;
        const auto inner = sample_grid(1, box_axes(0.5, s, n), f);
        lv.numerator = seminorm(inner, default_base_points(inner, cfg.max_bases), 2.0 * sv + e.alpha, s).seminorm;
        std::vector<Axis> slab{{-1.0, 0.0, n}, {-1.0, 1.0, n}, {-kTwoPi, kTwoPi, 2 * n - 1}};
        lv.slab_norm = holder_norm(sample_grid(1, slab, f), e.gamma, s, cfg.max_bases);
        lv.source_norm = holder_norm(sample_grid(1, box_axes(1.0, s, n), c), e.alpha, s, cfg.max_bases);
        lv.ratio = lv.numerator / (lv.slab_norm + lv.source_norm);
        rec.levels.push_back(lv);
      }
      const double a = rec.levels[rec.levels.size() - 2].ratio, b = rec.levels.back().ratio;
      rec.finite = std::all_of(rec.levels.begin(), rec.levels.end(),
                               [](const LevelRecord& l) { return std::isfinite(l.ratio) && l.ratio >= 0.0; });
      rec.relative_change = std::abs(b - a) / std::max(std::abs(b), 1e-300);
      rec.stable = rec.finite && rec.relative_change < cfg.stability_threshold;
    } catch (const std::exception& ex) {
      rec.error = ex.what();
      rec.finite = rec.stable = false;
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

double polynomial_control(double s, double gamma, int nodes) {
  const Exponents e = Exponents::lawful(s, gamma);
  const ScalingExponent se(s);
  // f = 0.7 t + 2 solves f_t + v f_x = L f + 0.7 for every kernel
  auto f = [](const Point& z) { return 0.7 * z.t + 2.0; };
  const auto inner = sample_grid(1, box_axes(0.5, se, nodes), f);
  return seminorm(inner, default_base_points(inner, 64), 2.0 * s + e.alpha, se).seminorm;
}

SampledField cylinder_samples(const PhaseFunction& f, const Point& z0, double r, int nodes, const ScalingExponent& s) {
  if (!(r > 0.0) || nodes < 2) throw std::invalid_argument("cylinder_samples: need r > 0 and nodes >= 2");
  const int d = z0.d;
  const double ts = s.two_s();
  const double ht = std::pow(r, ts), hx = std::pow(r, 1.0 + ts), hv = r;
  std::vector<Point> pts;
  const int axes = 1 + 2 * d;
  std::size_t total = 1;
  for (int a = 0; a < axes; ++a) total *= static_cast<std::size_t>(nodes);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t q = flat;
    Point xi = Point::zero(d);
    auto coord = [&](double lo, double hi) {
      const int i = static_cast<int>(q % nodes);
      q /= nodes;
      return lo + (hi - lo) * i / (nodes - 1);
    };
    xi.t = coord(-ht, 0.0);
    for (int i = 0; i < d; ++i) xi.x[i] = coord(-hx, hx);
    for (int i = 0; i < d; ++i) xi.v[i] = coord(-hv, hv);
    pts.push_back(compose(z0, xi));
  }
  std::vector<double> vals(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { vals[i] = f(pts[i]); });
  return SampledField(d, std::move(pts), std::move(vals), "cylinder samples");
}

DecayEstimate measure_holder_decay(const SampledField& f, const Point& z0, const std::vector<double>& radii,
                                   const ScalingExponent& s) {
  if (radii.size() < 2) throw std::invalid_argument("measure_holder_decay: need at least two radii");
  DecayEstimate out;
  const double floor = 1e-12 * std::max(1.0, sup_abs(f));
  std::vector<double> lx, ly;
  for (double r : radii) {
    const Cylinder q(z0, r, s);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t count = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!(f.points[i] == z0) && !cylinder_contains(q, f.points[i])) continue;
      lo = std::min(lo, f.values[i]);
      hi = std::max(hi, f.values[i]);
      ++count;
    }
    if (count < 2) throw std::invalid_argument("measure_holder_decay: fewer than two samples in Q_r");
    const double osc = 0.5 * (hi - lo);
    out.radii.push_back(r);
    out.oscillations.push_back(osc);
    if (osc > floor) {
      lx.push_back(std::log(r));
      ly.push_back(std::log(osc));
    }
  }
  if (lx.size() < 2) {
    out.degenerate = true;
    return out;
  }
  out.exponent = fit_slope(lx, ly);
  return out;
}

RegularityRatio operator_regularity_ratio(const Kernel& K, const PhaseFunction& f, const std::vector<Axis>& axes,
                                          double alpha, const Majorant& omega, const OperatorOptions& options,
                                          std::size_t max_bases) {
  const int d = K.d();
  const ScalingExponent& s = K.s();
  const auto fs = sample_grid(d, axes, f);
  std::vector<double> lv(fs.size());
  parallel_for(fs.size(), [&](std::size_t i) { lv[i] = apply_at(K, f, fs.points[i], {}, omega, options).value; });
  const SampledField lf(d, fs.points, std::move(lv), "L f");
  const auto bases = default_base_points(fs, max_bases);
  RegularityRatio r;
  r.operator_seminorm = seminorm(lf, bases, alpha, s).seminorm;
  r.field_seminorm = seminorm(fs, bases, s.two_s() + alpha, s).seminorm;
  if (r.operator_seminorm == 0.0) {
    r.ratio = 0.0;
  } else {
    r.ratio = r.field_seminorm > 0.0 ? r.operator_seminorm / r.field_seminorm : std::numeric_limits<double>::infinity();
  }
  return r;
}

double kernel_moment(const Kernel& K, const std::array<int, kMaxDim>& beta) {
  const int d = K.d();
  int order = 0;
  for (int i = 0; i < d; ++i) {
    if (beta[i] < 0 || beta[i] % 2 != 0) throw std::invalid_argument("kernel_moment: beta must be even");
    order += beta[i];
  }
  if (order < 2) throw std::invalid_argument("kernel_moment: need |beta| >= 2");
  if (K.is_zero()) return 0.0;
  if (std::isinf(K.support_radius()) && K.far_coefficient() != 0.0) {
    throw DivergenceError("kernel_moment: moment of order " + std::to_string(order) + " is infinite");
  }
  const auto& rule = K.sphere();
  auto mono = [&](std::size_t i) {
    double m = 1.0;
    for (int c = 0; c < d; ++c) m *= std::pow(rule.directions[i][c], beta[c]);
    return m;
  };
  double top = K.support_radius();
  if (std::isinf(top)) {
    const auto b = K.breakpoints();
    top = b.empty() ? 1.0 : *std::max_element(b.begin(), b.end());
  }
  const double r0 = std::ldexp(top, -60);
  CompensatedSum acc;
  for (double lo = r0; lo < top; lo *= 2.0) {
    const double hi = std::min(2.0 * lo, top);
    const auto q = integrate_directional(K, [&](std::size_t i, double r) { return mono(i) * std::pow(r, order); }, lo, hi);
    acc += q.value;
  }
  double head = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) head += rule.weights[i] * K.angular(i) * mono(i);
  acc += head * K.near_coefficient() * std::pow(r0, order - K.s().two_s()) / (order - K.s().two_s());
  return acc.value();
}

KineticPolynomial apply_to_polynomial(const Kernel& K, const KineticPolynomial& p) {
  const int d = p.d();
  if (K.d() != d) throw std::invalid_argument("apply_to_polynomial: dimension mismatch");
  KineticPolynomial out(p.s(), d);
  std::map<std::array<int, kMaxDim>, double> moments;
  for (const auto& [j, a] : p.terms()) {
    // every even beta <= jv with |beta| >= 2
    std::array<int, kMaxDim> beta{};
    while (true) {
      int order = 0;
      bool even = true;
      for (int i = 0; i < d; ++i) {
        order += beta[i];
        even = even && beta[i] % 2 == 0;
      }
      if (even && order >= 2) {
        auto it = moments.find(beta);
        if (it == moments.end()) it = moments.emplace(beta, kernel_moment(K, beta)).first;
        double c = a * it->second;
        MultiIndex r = j;
        for (int i = 0; i < d; ++i) {
          c *= binomial(j.jv[i], beta[i]);
          r.jv[i] -= beta[i];
        }
        out.add_term(r, c);
      }
      int i = 0;
      while (i < d && ++beta[i] > j.jv[i]) beta[i++] = 0;
      if (i == d) break;
    }
  }
  return out;
}

double liouville_residual(const KineticPolynomial& p, const Kernel& K, const Point& xi, const std::vector<Axis>& axes) {
  if (xi.d != p.d()) throw std::invalid_argument("liouville_residual: dimension mismatch");
  if (xi.t > 0.0) throw std::invalid_argument("liouville_residual: increment must have h <= 0");
  const KineticPolynomial g = left_translate(p, xi) - p;
  const KineticPolynomial r = g.transport() - apply_to_polynomial(K, g);
  GridField grid(p.d(), axes);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(r.eval(grid.point(i))));
  return worst;
}

std::vector<LiouvilleCase> liouville_cases(const ScalingExponent& s) {
  const Point xi(-0.5, 0.3, 0.7);
  const Kernel stable = Kernel::stable_like(1, s);
  const Kernel trunc = Kernel::truncated_stable(1, s, 1.0);
  std::vector<LiouvilleCase> out;
  out.push_back({"constant", KineticPolynomial::constant(3.0, s, 1), stable, xi});
  out.push_back({"v", KineticPolynomial::monomial(MultiIndex::v_power(0, 1, 1), 1.0, s), stable, xi});
  out.push_back({"t", KineticPolynomial::monomial(MultiIndex::t_power(1, 1), 1.0, s), stable, xi});
  out.push_back({"v^2 truncated", KineticPolynomial::monomial(MultiIndex::v_power(0, 2, 1), 1.0, s), trunc, xi});
  KineticPolynomial free_streaming(s, 1);
  free_streaming.add_term(MultiIndex::x_power(0, 1, 1), 1.0);
  free_streaming.add_term(MultiIndex(1, {0}, {1}, 1), -1.0);
  out.push_back({"x - t v", free_streaming, stable, xi});
  KineticPolynomial heat(s, 1);
  heat.add_term(MultiIndex::v_power(0, 2, 1), 1.0);
  heat.add_term(MultiIndex::t_power(1, 1), kernel_moment(trunc, {2}));
  out.push_back({"v^2 + m2 t truncated", heat, trunc, xi});
  return out;
}

GrowthProbe rough_time_probe(double s, double alpha, int levels) {
  if (levels < 2) throw std::invalid_argument("rough_time_probe: need two levels");
  const ScalingExponent se(s);
  const double beta = 2.0 * s + alpha;
  const int q = 1 << (static_cast<int>(std::ceil(2.0 * s / alpha)) + 1);
  GrowthProbe out;
  int n = 5;
  for (int l = 0; l < levels; ++l) {
    // t in [-1, 0] with the kink at t = -1/2 on the grid; x and v frozen
    const GridField g = GridField::sample(1, {{-1.0, 0.0, n}, {0.0, 0.0, 1}, {0.0, 0.0, 1}},
                                          [](const Point& z) { return std::abs(z.t + 0.5); });
    const auto sf = g.to_sampled();
    const std::vector<Point> base{Point(-0.5, 0.0, 0.0)};
    out.spacings.push_back(1.0 / (n - 1));
    out.estimates.push_back(seminorm(sf, base, beta, se).seminorm);
    if (l > 0) out.growth.push_back(out.estimates[l] / out.estimates[l - 1]);
    n = (n - 1) * q + 1;
  }
  return out;
}

ExponentLawProbe exponent_law_probe(const HarnessConfig& cfg) {
  ExponentLawProbe p;
  HarnessConfig lawful = cfg;
  lawful.alpha_override.reset();
  p.lawful = run_schauder_sweep(lawful);
  // alpha = gamma per s: run one s at a time
  for (double s : cfg.s_values) {
    HarnessConfig v = cfg;
    v.s_values = {s};
    v.alpha_override = cfg.exponents(s).gamma;
    auto r = run_schauder_sweep(v);
    p.violated.records.insert(p.violated.records.end(), r.records.begin(), r.records.end());
    p.violated.seconds += r.seconds;
  }
  auto growth = [](const SweepRecord& r) {
    if (r.levels.size() < 2 || !(r.levels.front().ratio > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return r.levels.back().ratio / r.levels.front().ratio;
  };
  for (const auto& r : p.lawful.records) p.lawful_growth.push_back(growth(r));
  for (const auto& r : p.violated.records) {
    p.violated_growth.push_back(growth(r));
    if (p.violated_growth.back() > 1.0 + cfg.stability_threshold) p.any_violation_grows = true;
  }
  return p;
}

std::vector<SplitLemmaLevel> split_lemma_constants(double s, const std::vector<int>& ladder,
                                                   const OperatorOptions& options) {
  const ScalingExponent se(s);
  const Exponents e = Exponents::lawful(s, 0.8 * std::min(1.0, 2.0 * s));
  const Kernel K0 = Kernel::stable_like(1, se);
  const double psi1 = symbol(K0, 1.0);
  auto a = [](const Point& z) { return 1.0 + 0.25 * std::sin(z.t); };
  const KernelFamily fam = KernelFamily::modulated(K0, a, "1 + sin(t)/4");
  auto f = [psi1](const Point& z) {
    return std::exp(-psi1 * (z.t + 0.25 * (1.0 - std::cos(z.t)))) * std::cos(z.v[0]);
  };
  auto zero = [](const Point&) { return 0.0; };
  const Majorant omega = Majorant::constant(1.0, se);
  const CutoffSpec eta(0.75, 1.0);

  std::vector<SplitLemmaLevel> out;
  for (int n : ladder) {
    std::mt19937_64 rng(17);
    SplitLemmaLevel lv;
    lv.nodes = n;
    const auto q1 = sample_grid(1, box_axes(1.0, se, n), f);
    const double f_gamma = holder_norm(q1, e.gamma, se, 48);
    const double f_top = holder_norm(q1, 2.0 * s + e.alpha, se, 48);
    // pairs of Q_{1/2} grid nodes from a fixed random subset, offset along each axis by one step,
    // a quarter and half the box, so the coarse separations recur at every level
    const GridField g(1, box_axes(0.5, se, n));
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    const int offsets[] = {1, std::max(1, (n - 1) / 4), (n - 1) / 2};
    std::map<std::size_t, std::size_t> slot;  // grid node -> evaluation index
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::size_t> bases;
    auto node = [&](std::size_t flat) { return slot.emplace(flat, slot.size()).first->second; };
    for (int k = 0; k < 8; ++k) {
      const std::size_t b = pick(rng);
      const auto idx = g.multi_index(b);
      bases.push_back(node(b));
      for (int axis = 0; axis < 3; ++axis) {
        for (int off : offsets) {
          auto nb = idx;
          nb[axis] = idx[axis] + off < g.axes()[axis].n ? idx[axis] + off : idx[axis] - off;
          const std::size_t a = node(b), c = node(g.flat_index(nb));
          if (a != c) pairs.emplace_back(a, c);
        }
      }
    }
    std::vector<Point> pts(slot.size());
    for (const auto& [flat, i] : slot) pts[i] = g.point(flat);
    std::vector<std::pair<Point, Point>> point_pairs;
    for (const auto& [a, c] : pairs) point_pairs.emplace_back(pts[a], pts[c]);
    const double radii[] = {0.25, 1.0, 4.0};
    const double A0 = holder_modulus(fam, point_pairs, radii, e.alpha, se).A0;
    std::vector<FreezeSplitValue> split(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { split[i] = freeze_split(fam, f, omega, eta, pts[i], options); });
    std::vector<double> res(bases.size());
    parallel_for(bases.size(), [&](std::size_t i) {
      res[i] = std::abs(freeze_split_residual(fam, f, zero, omega, eta, pts[bases[i]], 1e-3, options).residual);
    });
    for (const auto& [a, c] : pairs) {
      const double da = std::pow(left_distance(pts[a], pts[c], se), e.alpha);
      if (A0 > 0.0) lv.A_constant = std::max(lv.A_constant, std::abs(split[a].A - split[c].A) / (A0 * (f_top + f_gamma) * da));
      lv.B_constant = std::max(lv.B_constant, std::abs(split[a].B - split[c].B) / (f_gamma * da));
    }
    for (double r : res) lv.max_residual = std::max(lv.max_residual, r);
    out.push_back(lv);
  }
  return out;
}

}  // namespace kinetic
