#include "kinetic/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "kinetic/error.hpp"

namespace kinetic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMajorantRingCap = 500;

double span_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// int_x^inf c(r) (1 + beta sin(j r)) r^{-1-2s} dr summed over directions: kernel mass outside B_x.
double mass_outside(const Kernel& K, double x) {
  const double p = 1.0 + K.s().two_s();
  auto piece = [&](double a) {
    if (std::isinf(a)) return 0.0;
    double t = power_oscillatory_tail(p, 0.0, a, true);
    if (K.depth() != 0.0 && K.frequency() != 0.0) t += K.depth() * power_oscillatory_tail(p, K.frequency(), a, false);
    return t;
  };
  std::vector<double> cuts{x};
  for (double b : K.breakpoints()) {
    if (b > x) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(kInf);
  double radial = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    const double c = K.profile(std::isinf(b) ? 2.0 * a + 1.0 : 0.5 * (a + b));
    if (c != 0.0) radial += c * (piece(a) - piece(b));
  }
  const auto& rule = K.sphere();
  double ang = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) ang += rule.weights[i] * K.angular(i);
  return ang * radial;
}

double far_lambda(const Kernel& K, double R) {
  double lam = 0.0;
  for (double r : {R, 2.0 * R, 4.0 * R}) lam = std::max(lam, upper_bound_ratio(K, r));
  return lam;
}

// Cut points r0 < 2^j < ... < hi, with `extra` inserted.
std::vector<double> ring_cuts(double r0, double hi, std::initializer_list<double> extra,
                              std::span<const double> more = {}) {
  std::vector<double> c{r0, hi};
  for (int e = static_cast<int>(std::ceil(std::log2(r0))); std::ldexp(1.0, e) < hi; ++e) {
    const double x = std::ldexp(1.0, e);
    if (x > r0) c.push_back(x);
  }
  for (double x : extra) {
    if (x > r0 && x < hi) c.push_back(x);
  }
  for (double x : more) {
    if (x > r0 && x < hi) c.push_back(x);
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

// Largest r <= r_max below every profile jump with frequency * r <= 2, so the head series converge.
double head_radius(const Kernel& K, double r_max) {
  double r = r_max;
  while (K.frequency() * K.depth() != 0.0 && K.frequency() * r > 2.0) r *= 0.5;
  return r;
}

// int_0^rh c(r) (1 + depth sin(frequency r)) r^p dr, p > -1.
double head_moment(const Kernel& K, double p, double rh) {
  std::vector<double> cuts{0.0};
  for (double b : K.breakpoints()) {
    if (b > 0.0 && b < rh) cuts.push_back(b);
  }
  cuts.push_back(rh);
  std::sort(cuts.begin(), cuts.end());
  const double beta = K.depth(), j = K.frequency();
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    const double c = K.profile(0.5 * (a + b));
    if (c == 0.0) continue;
    double m = (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (p + 1.0);
    if (beta != 0.0 && j != 0.0) {
      double coeff = j;  // j^{2n+1} / (2n+1)!
      for (int n = 0; n < 40; ++n) {
        const double e = p + 2.0 * n + 2.0;
        m += beta * ((n % 2) ? -coeff : coeff) * (std::pow(b, e) - std::pow(a, e)) / e;
        coeff *= j * j / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
      }
    }
    total += c * m;
  }
  return total;
}

}  // namespace

Majorant::Majorant(std::function<double(double)> bound, const ScalingExponent& s, std::string description)
    : bound_(std::move(bound)), description_(std::move(description)) {
  if (!bound_) throw std::invalid_argument("majorant: missing evaluator");
  (void)majorant_integral(*this, 1.0, s);
}

Majorant Majorant::constant(double M, const ScalingExponent& s) {
  if (!(M >= 0.0)) throw std::invalid_argument("majorant: bound must be nonnegative");
  return Majorant([M](double) { return M; }, s, "constant " + std::to_string(M));
}

Majorant Majorant::power(double C, double gamma, const ScalingExponent& s) {
  if (!(C >= 0.0)) throw std::invalid_argument("majorant: bound must be nonnegative");
  return Majorant([C, gamma](double r) { return C * std::pow(r, gamma); }, s,
                  "power " + std::to_string(C) + " r^" + std::to_string(gamma));
}

double majorant_integral(const Majorant& omega, double a, const ScalingExponent& s) {
  if (!(a > 0.0)) throw std::invalid_argument("majorant_integral: lower limit must be positive");
  const double ts = s.two_s();
  const auto& g = gauss_legendre(32);
  CompensatedSum total;
  std::vector<double> contrib;
  for (int k = 0; k < kMajorantRingCap; ++k) {
    // ring [a 2^k, a 2^{k+1}] with r = a 2^k u, u in [1, 2]
    const double base = std::ldexp(a, k);
    double c = 0.0;
    for (int i = 0; i < 32; ++i) {
      const double u = 1.5 + 0.5 * g.nodes[i];
      const double w = omega(base * u);
      if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("majorant: value must be finite and nonnegative");
      c += 0.5 * g.weights[i] * w * std::pow(u, -1.0 - ts);
    }
    c *= std::pow(base, -ts);
    total += c;
    contrib.push_back(c);
    if (k >= 8 && c <= 1e-17 * total.value()) return total.value();
    if (k >= 64) {
      bool flat = true;
      for (int j = k - 7; j <= k; ++j) flat = flat && contrib[j] >= (1.0 - 1e-9) * contrib[j - 1] && contrib[j] > 0.0;
      if (flat) throw DivergenceError("majorant: int omega(r) r^{-1-2s} dr diverges");
    }
  }
  const double q = contrib.back() / contrib[contrib.size() - 2];
  if (!(q < 1.0)) throw DivergenceError("majorant: int omega(r) r^{-1-2s} dr diverges");
  return total.value() + contrib.back() * q / (1.0 - q);
}

double tail_constant(const ScalingExponent& s) { return std::pow(2.0, 6.0 - s.two_s()) / 3.0; }

double tail_bound(const Majorant& omega, double R, double Lambda, const ScalingExponent& s) {
  if (!(R > 0.0)) throw std::invalid_argument("tail_bound: R must be positive");
  if (!(Lambda >= 0.0)) throw std::invalid_argument("tail_bound: Lambda must be nonnegative");
  return Lambda * tail_constant(s) * majorant_integral(omega, 0.5 * R, s);
}

PointwiseValue apply_pointwise(const Kernel& K, const VelocityFunction& f, std::span<const double> v0,
                               const HolderDatum& reg, const Majorant& omega, const OperatorOptions& opt) {
  const int d = K.d();
  if (static_cast<int>(v0.size()) != d) throw std::invalid_argument("apply_pointwise: v0 dimension mismatch");
  if (!(opt.split_radius > 0.0) || !(opt.far_radius > opt.split_radius)) {
    throw std::invalid_argument("apply_pointwise: need 0 < split_radius < far_radius");
  }
  if (opt.inner_octaves < 1) throw std::invalid_argument("apply_pointwise: inner_octaves must be positive");
  PointwiseValue out;
  if (K.is_zero()) return out;
  const auto& rule = K.sphere();
  const double f0 = f(v0);
  const double ts = K.s().two_s();
  const double rho = opt.split_radius, R = opt.far_radius;
  const double r0 = head_radius(K, std::ldexp(rho, -opt.inner_octaves));

  std::vector<double> wp(d), wm(d);
  auto second_difference = [&](std::size_t i, double r) {
    const auto& th = rule.directions[i];
    for (int c = 0; c < d; ++c) {
      wp[c] = v0[c] + r * th[c];
      wm[c] = v0[c] - r * th[c];
    }
    return 0.5 * ((f(wp) - f0) + (f(wm) - f0));
  };
  auto integrand = [&](std::size_t i, double r) {
    if (opt.symmetrize) return second_difference(i, r);
    const auto& th = rule.directions[i];
    for (int c = 0; c < d; ++c) wp[c] = v0[c] + r * th[c];
    return f(wp) - f0;
  };

  const double top = std::min(R, K.support_radius());
  CompensatedSum near, far;
  double err = 0.0;
  if (top > r0) {
    const auto cuts = ring_cuts(r0, top, {rho}, opt.breakpoints);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k], b = cuts[k + 1];
      const auto q = integrate_directional(K, integrand, a, b, opt.frequency_hint);
      (b <= rho ? near : far) += q.value;
      err += q.error;
      if (opt.trace) {
        out.trace.push_back({static_cast<int>(std::ceil(std::log2(b))), near.value() + far.value(), err});
      }
    }
  }

  // Ball B_{r0}: second difference fitted as q0 r^2 + q2 r^4 from r0 and 2 r0.
  if (K.support_radius() > 0.0) {
    const double pa = 1.0 - ts, pb = 3.0 - ts;
    const double ma = head_moment(K, pa, r0), mb = head_moment(K, pb, r0);
    if (ma != 0.0 || mb != 0.0) {
      double fitted = 0.0, single = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const double w = rule.weights[i] * K.angular(i);
        const double q1 = second_difference(i, r0) / (r0 * r0);
        const double q2 = second_difference(i, 2.0 * r0) / (4.0 * r0 * r0);
        fitted += w * ((4.0 * q1 - q2) / 3.0 * ma + (q2 - q1) / (3.0 * r0 * r0) * mb);
        single += w * q1 * ma;
      }
      near += fitted;
      if (reg.seminorm > 0.0) {
        if (!(reg.epsilon > 0.0)) throw std::invalid_argument("apply_pointwise: Hölder datum needs epsilon > 0");
        double ang = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) ang += rule.weights[i] * K.angular(i);
        out.origin_bound = std::abs(fitted) + reg.seminorm * ang * head_moment(K, reg.epsilon - 1.0, r0);
      } else {
        out.origin_bound = std::abs(fitted - single);
      }
    }
  }

  if (K.support_radius() > R) {
    const double lam = far_lambda(K, R);
    if (opt.tail_model == TailModel::even_part) {
      far += -f0 * mass_outside(K, R);
    }
    out.tail = tail_bound(omega, R, lam, K.s());
  }
  out.near = near.value();
  out.far = far.value();
  out.value = out.near + out.far;
  out.quadrature_error = err;
  if (!std::isfinite(out.value)) throw ConvergenceError("apply_pointwise: non-finite result");
  return out;
}

void write_trace_csv(std::ostream& os, const std::vector<RingTrace>& trace) {
  os << "ring,partial_sum,bound\n";
  const auto prec = os.precision(17);
  for (const auto& t : trace) os << t.ring << ',' << t.partial_sum << ',' << t.error_bound << '\n';
  os.precision(prec);
}

PointwiseValue apply_at(const Kernel& K, const PhaseFunction& f, const Point& z, const HolderDatum& reg,
                        const Majorant& omega, const OperatorOptions& options) {
  if (z.d != K.d()) throw std::invalid_argument("apply_at: dimension mismatch");
  Point w = z;
  auto fv = [&](std::span<const double> v) {
    for (int i = 0; i < z.d; ++i) w.v[i] = v[i];
    return f(w);
  };
  return apply_pointwise(K, fv, std::span<const double>(z.v.data(), z.d), reg, omega, options);
}

namespace {

struct NodeSet {
  std::vector<Point> xi;
  std::vector<double> weight;  // quadrature weight times phi
};

std::vector<std::pair<double, double>> axis_nodes(double h, int n) {
  if (h == 0.0) return {{0.0, 1.0}};
  const auto& g = gauss_legendre(n);
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < n; ++i) out.emplace_back(h * g.nodes[i], h * g.weights[i]);
  return out;
}

NodeSet mollifier_nodes(const Mollifier& phi) {
  check_dim(phi.d);
  if (!phi.fn) throw std::invalid_argument("mollifier: missing weight function");
  if (phi.ht < 0.0 || phi.hx < 0.0 || phi.hv < 0.0) throw std::invalid_argument("mollifier: negative half-width");
  std::vector<std::vector<std::pair<double, double>>> axes;
  axes.push_back(axis_nodes(phi.ht, phi.nodes));
  for (int i = 0; i < phi.d; ++i) axes.push_back(axis_nodes(phi.hx, phi.nodes));
  for (int i = 0; i < phi.d; ++i) axes.push_back(axis_nodes(phi.hv, phi.nodes));
  NodeSet ns;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    Point xi = Point::zero(phi.d);
    double w = 1.0;
    xi.t = axes[0][idx[0]].first;
    w *= axes[0][idx[0]].second;
    for (int i = 0; i < phi.d; ++i) {
      xi.x[i] = axes[1 + i][idx[1 + i]].first;
      w *= axes[1 + i][idx[1 + i]].second;
      xi.v[i] = axes[1 + phi.d + i][idx[1 + phi.d + i]].first;
      w *= axes[1 + phi.d + i][idx[1 + phi.d + i]].second;
    }
    const double pv = phi.fn(xi);
    if (pv != 0.0) {
      ns.xi.push_back(xi);
      ns.weight.push_back(w * pv);
    }
    std::size_t a = axes.size();
    while (a-- > 0) {
      if (++idx[a] < axes[a].size()) break;
      idx[a] = 0;
    }
    if (a == static_cast<std::size_t>(-1)) break;
  }
  return ns;
}

double bump1(double u) { return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; }

}  // namespace

Mollifier Mollifier::bump(int d, double ht, double hx, double hv, int nodes) {
  Mollifier m;
  m.d = d;
  m.ht = ht;
  m.hx = hx;
  m.hv = hv;
  m.nodes = nodes;
  auto raw = [d, ht, hx, hv](const Point& z) {
    double p = ht > 0.0 ? bump1(z.t / ht) : 1.0;
    for (int i = 0; i < d; ++i) {
      if (hx > 0.0) p *= bump1(z.x[i] / hx);
      if (hv > 0.0) p *= bump1(z.v[i] / hv);
    }
    return p;
  };
  m.fn = raw;
  const auto ns = mollifier_nodes(m);
  double total = 0.0;
  for (double w : ns.weight) total += w;
  if (!(total > 0.0)) throw std::invalid_argument("mollifier: degenerate bump");
  m.fn = [raw, total](const Point& z) { return raw(z) / total; };
  return m;
}

std::vector<double> kinetic_convolve(const Mollifier& phi, const PhaseFunction& f, const std::vector<Point>& points) {
  const auto ns = mollifier_nodes(phi);
  std::vector<double> out(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (points[p].d != phi.d) throw std::invalid_argument("kinetic_convolve: dimension mismatch");
    CompensatedSum acc;
    for (std::size_t n = 0; n < ns.xi.size(); ++n) acc += ns.weight[n] * f(compose(ns.xi[n], points[p]));
    out[p] = acc.value();
  }
  return out;
}

SampledField kinetic_convolve(const Mollifier& phi, const GridField& f) {
  if (f.d() != phi.d) throw std::invalid_argument("kinetic_convolve: dimension mismatch");
  const int d = f.d();
  std::vector<Point> inside;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point z = f.point(i);
    const double dx = phi.hx + std::abs(z.t) * phi.hv;
    bool ok = true;
    for (int st : {-1, 1}) {
      Point c = z;
      c.t += st * phi.ht;
      for (int k = 0; k < d; ++k) {
        c.x[k] += st * dx;
        c.v[k] += st * phi.hv;
      }
      ok = ok && f.contains(c);
    }
    if (ok) inside.push_back(z);
  }
  if (inside.empty()) throw std::invalid_argument("kinetic_convolve: grid has no node with enough margin for the mollifier");
  auto vals = kinetic_convolve(phi, [&](const Point& z) { return f.interpolate(z); }, inside);
  return SampledField(d, std::move(inside), std::move(vals), "mollified");
}

KineticPolynomial convolve_polynomial(const Mollifier& phi, const KineticPolynomial& p) {
  if (p.d() != phi.d) throw std::invalid_argument("convolve_polynomial: dimension mismatch");
  const auto ns = mollifier_nodes(phi);
  KineticPolynomial out(p.s(), p.d());
  for (std::size_t n = 0; n < ns.xi.size(); ++n) out = out + left_translate(p, ns.xi[n]) * ns.weight[n];
  out.prune(1e-14);
  return out;
}

CutoffSpec::CutoffSpec(double inner_, double outer_, int order_) : inner(inner_), outer(outer_), order(order_) {
  if (!(inner > 0.0 && outer > inner)) throw std::invalid_argument("cutoff: need 0 < inner < outer");
  if (order < 0 || order > 8) throw std::invalid_argument("cutoff: order must lie in [0, 8]");
}

double CutoffSpec::operator()(std::span<const double> v) const {
  const double r = span_norm(v);
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  const double u = (outer - r) / (outer - inner);
  // smoothstep of order n: u^{n+1} sum_k C(n+k,k) C(2n+1,n-k) (-u)^k
  const int n = order;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    double c1 = 1.0, c2 = 1.0;
    for (int i = 1; i <= k; ++i) c1 = c1 * (n + i) / i;
    for (int i = 1; i <= n - k; ++i) c2 = c2 * (2 * n + 2 - i) / i;
    acc += c1 * c2 * std::pow(-u, k);
  }
  return std::pow(u, n + 1) * acc;
}

FreezeSplitValue freeze_split(const KernelFamily& F, const PhaseFunction& f, const Majorant& omega,
                              const CutoffSpec& eta, const Point& z, const OperatorOptions& options) {
  const int d = z.d;
  const std::span<const double> v0(z.v.data(), d);
  const double vn = span_norm(v0);
  if (vn > eta.inner) throw std::invalid_argument("freeze_split: z lies outside the plateau of the cutoff");
  const Kernel& K0 = F.reference();
  if (K0.d() != d) throw std::invalid_argument("freeze_split: dimension mismatch");

  Point w = z;
  auto fv = [&](std::span<const double> v) {
    for (int i = 0; i < d; ++i) w.v[i] = v[i];
    return f(w);
  };
  auto etaf = [&](std::span<const double> v) {
    const double e = eta(v);
    return e == 0.0 ? 0.0 : e * fv(v);
  };
  const double reach = eta.outer + vn;
  OperatorOptions opt = options;
  opt.trace = false;
  opt.far_radius = std::max(opt.far_radius, 2.0 * reach);
  const double R = opt.far_radius;

  FreezeSplitValue out;
  const HolderDatum none{};
  // eta f vanishes beyond R, so the even-part tail is exactly -eta f(v) times the outer mass.
  OperatorOptions exact = opt;
  exact.tail_model = TailModel::even_part;
  // eta f loses smoothness where |v + w| crosses inner or outer
  for (double r : {eta.inner - vn, eta.inner + vn, eta.outer - vn, reach}) exact.breakpoints.push_back(r);
  const auto l0 = apply_pointwise(K0, etaf, v0, none, Majorant::constant(0.0, K0.s()), exact);
  out.L0_eta_f = l0.value;
  out.error_bound = l0.error_bound();

  if (auto a = F.amplitude(z)) {
    if (*a != 1.0) {
      const auto lf = apply_pointwise(K0, fv, v0, none, omega, opt);
      out.A = (*a - 1.0) * lf.value;
      out.error_bound += std::abs(*a - 1.0) * lf.error_bound();
    }
  } else {
    const auto lz = apply_pointwise(F.at(z), fv, v0, none, omega, opt);
    const auto lf = apply_pointwise(K0, fv, v0, none, omega, opt);
    out.A = lz.value - lf.value;
    out.error_bound += lz.error_bound() + lf.error_bound();
  }

  // B: the integrand vanishes for |w| < inner - |v|.
  const double lo = std::max(eta.inner - vn, std::ldexp(eta.inner, -40));
  const auto& rule = K0.sphere();
  std::vector<double> pt(d);
  auto integrand = [&](std::size_t i, double r) {
    for (int c = 0; c < d; ++c) pt[c] = v0[c] + r * rule.directions[i][c];
    const double e = eta(pt);
    return e == 1.0 ? 0.0 : (e - 1.0) * fv(pt);
  };
  const double top = std::min(R, K0.support_radius());
  CompensatedSum b;
  double err = 0.0;
  if (top > lo) {
    const auto cuts = ring_cuts(lo, top, {eta.inner + vn, eta.outer - vn, reach});
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const auto q = integrate_directional(K0, integrand, cuts[k], cuts[k + 1], opt.frequency_hint);
      b += q.value;
      err += q.error;
    }
  }
  out.B = b.value();
  out.error_bound += err;
  if (K0.support_radius() > R) {
    // -int_{|w|>R} f(v+w) K0: only the even part of f about v contributes.
    double t = tail_bound(omega, R, far_lambda(K0, R), K0.s());
    if (opt.tail_model == TailModel::second_difference) t += std::abs(fv(v0)) * mass_outside(K0, R);
    out.error_bound += t;
  }
  return out;
}

SplitResidual freeze_split_residual(const KernelFamily& F, const PhaseFunction& f, const PhaseFunction& c,
                                    const Majorant& omega, const CutoffSpec& eta, const Point& z, double step,
                                    const OperatorOptions& options) {
  if (!(step > 0.0)) throw std::invalid_argument("freeze_split_residual: step must be positive");
  SplitResidual r;
  auto along = [&](double tau) {
    Point p = z;
    p.t += tau;
    for (int i = 0; i < z.d; ++i) p.x[i] += tau * z.v[i];
    return f(p);
  };
  const double e = eta(std::span<const double>(z.v.data(), z.d));
  r.transport = e * (-along(2 * step) + 8 * along(step) - 8 * along(-step) + along(-2 * step)) / (12 * step);
  r.source = c(z);
  r.split = freeze_split(F, f, omega, eta, z, options);
  r.residual = r.transport - r.split.L0_eta_f - (r.source + r.split.A - r.split.B);
  return r;
}

}  // namespace kinetic
