#include "kinetic/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "kinetic/distance.hpp"
#include "kinetic/error.hpp"

namespace kinetic {

namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kInnerOctaves = 40;
constexpr double kQuadRelTol = 1e-6;

void check_result(const QuadResult& q, const char* what) {
  if (!std::isfinite(q.value) || q.error > kQuadRelTol * std::abs(q.value) + 1e-14) {
    throw ConvergenceError(std::string(what) + ": quadrature did not converge");
  }
}

double dot_span(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> merged_breaks(const Kernel& a, const Kernel& b) {
  auto out = a.breakpoints();
  const auto other = b.breakpoints();
  out.insert(out.end(), other.begin(), other.end());
  return out;
}

void require_compatible(const Kernel& a, const Kernel& b) {
  if (a.d() != b.d() || !(a.s() == b.s())) {
    throw std::invalid_argument("kernels differ in dimension or order");
  }
}

}  // namespace

std::string_view to_string(KernelForm form) noexcept {
  switch (form) {
    case KernelForm::stable_like: return "stable_like";
    case KernelForm::truncated_stable: return "truncated_stable";
    case KernelForm::ring_measure: return "ring_measure";
    case KernelForm::oscillatory: return "oscillatory";
  }
  return "?";
}

Kernel::Kernel(int d, ScalingExponent s, KernelForm form) : d_(d), s_(s), form_(form) {
  check_dim(d);
  angular_.assign(sphere_rule(d).size(), 1.0);
}

Kernel Kernel::stable_like(int d, ScalingExponent s, double amplitude,
                           const std::function<double(std::span<const double>)>& angular) {
  check_dim(d);
  std::vector<double> samples;
  for (const auto& th : sphere_rule(d).directions) samples.push_back(angular ? angular(th) : 1.0);
  return stable_like_sampled(d, s, amplitude, std::move(samples));
}

Kernel Kernel::stable_like_sampled(int d, ScalingExponent s, double amplitude, std::vector<double> samples) {
  Kernel k(d, s, KernelForm::stable_like);
  const auto& rule = sphere_rule(d);
  if (samples.size() != rule.size()) throw std::invalid_argument("stable_like: angular samples do not match the sphere rule");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw std::invalid_argument("stable_like: amplitude must be >= 0");
  for (double a : samples) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("stable_like: angular density must be nonnegative");
  }
  std::vector<double> sym(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) sym[i] = 0.5 * (samples[i] + samples[rule.antipode[i]]);
  for (std::size_t i = 0; i < sym.size(); ++i) k.angular_[i] = amplitude * sym[i];
  k.segments_ = {{0.0, kInf, 1.0}};
  k.params_ = json{{"amplitude", amplitude}, {"angular", sym}}.dump();
  return k;
}

Kernel Kernel::truncated_stable(int d, ScalingExponent s, double cutoff, double amplitude) {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw std::invalid_argument("truncated_stable: cutoff must be positive");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw std::invalid_argument("truncated_stable: amplitude must be >= 0");
  Kernel k(d, s, KernelForm::truncated_stable);
  for (auto& a : k.angular_) a = amplitude;
  k.segments_ = {{0.0, cutoff, 1.0}};
  k.params_ = json{{"cutoff", cutoff}, {"amplitude", amplitude}}.dump();
  return k;
}

Kernel Kernel::ring_measure(int d, ScalingExponent s, std::map<int, double> masses) {
  Kernel k(d, s, KernelForm::ring_measure);
  const double area = sphere_rule(d).area();
  const double ts = s.two_s();
  json m = json::object();
  for (const auto& [ring, mass] : masses) {
    if (!(mass >= 0.0) || !std::isfinite(mass)) throw std::invalid_argument("ring_measure: masses must be nonnegative");
    m[std::to_string(ring)] = mass;
    if (mass == 0.0) continue;
    const double lo = std::ldexp(1.0, ring - 1), hi = std::ldexp(1.0, ring);
    const double profile_mass = area * (std::pow(lo, -ts) - std::pow(hi, -ts)) / ts;
    k.segments_.push_back({lo, hi, mass / profile_mass});
  }
  k.params_ = json{{"masses", m}}.dump();
  return k;
}

Kernel Kernel::oscillatory(int d, ScalingExponent s, double frequency, double depth, double amplitude) {
  if (!(depth >= 0.0 && depth <= 1.0)) throw std::invalid_argument("oscillatory: depth must lie in [0,1]");
  if (!(frequency >= 0.0) || !std::isfinite(frequency)) throw std::invalid_argument("oscillatory: frequency must be >= 0");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw std::invalid_argument("oscillatory: amplitude must be >= 0");
  Kernel k(d, s, KernelForm::oscillatory);
  for (auto& a : k.angular_) a = amplitude;
  k.segments_ = {{0.0, kInf, 1.0}};
  k.depth_ = depth;
  k.frequency_ = frequency;
  k.params_ = json{{"frequency", frequency}, {"depth", depth}, {"amplitude", amplitude}}.dump();
  return k;
}

Kernel Kernel::zero(int d, ScalingExponent s) { return ring_measure(d, s, {}); }

Kernel Kernel::scaled(double r) const {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("scaled: factor must be positive");
  Kernel k = *this;
  for (auto& seg : k.segments_) {
    seg.lo /= r;
    seg.hi /= r;
  }
  k.frequency_ *= r;
  k.scale_ *= r;
  return k;
}

Kernel Kernel::multiplied(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) throw std::invalid_argument("multiplied: factor must be >= 0");
  Kernel k = *this;
  for (auto& a : k.angular_) a *= factor;
  k.factor_ *= factor;
  return k;
}

double Kernel::profile(double r) const noexcept {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), r,
                             [](double x, const Segment& s) { return x < s.lo; });
  if (it == segments_.begin()) return 0.0;
  --it;
  return r < it->hi ? it->coeff : 0.0;
}

double Kernel::modulation(double r) const noexcept {
  return depth_ == 0.0 ? 1.0 : 1.0 + depth_ * std::sin(frequency_ * r);
}

double Kernel::radial(std::size_t i, double r) const noexcept {
  const double c = profile(r);
  if (c == 0.0) return 0.0;
  return angular_[i] * c * std::pow(r, -d_ - s_.two_s()) * modulation(r);
}

std::vector<double> Kernel::breakpoints() const {
  std::vector<double> b;
  for (const auto& s : segments_) {
    if (s.lo > 0.0) b.push_back(s.lo);
    if (std::isfinite(s.hi)) b.push_back(s.hi);
  }
  return b;
}

double Kernel::near_coefficient() const noexcept {
  return !segments_.empty() && segments_.front().lo == 0.0 ? segments_.front().coeff : 0.0;
}

double Kernel::far_coefficient() const noexcept {
  return !segments_.empty() && std::isinf(segments_.back().hi) ? segments_.back().coeff : 0.0;
}

double Kernel::support_radius() const noexcept { return segments_.empty() ? 0.0 : segments_.back().hi; }

bool Kernel::is_zero() const noexcept {
  if (segments_.empty()) return true;
  return std::all_of(angular_.begin(), angular_.end(), [](double a) { return a == 0.0; });
}

std::string Kernel::to_json() const {
  json j{{"form", std::string(to_string(form_))},
         {"s", s_.value()},
         {"d", d_},
         {"parameters", json::parse(params_)}};
  if (scale_ != 1.0) j["scale"] = scale_;
  if (factor_ != 1.0) j["factor"] = factor_;
  return j.dump();
}

Kernel Kernel::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("kernel JSON: ") + e.what());
  }
  try {
    const std::string form = j.at("form").get<std::string>();
    const ScalingExponent s(j.at("s").get<double>());
    const int d = j.value("d", 1);
    const json p = j.value("parameters", json::object());
    std::optional<Kernel> k;
    if (form == "stable_like") {
      const double amp = p.value("amplitude", 1.0);
      if (p.contains("angular")) {
        k = stable_like_sampled(d, s, amp, p.at("angular").get<std::vector<double>>());
      } else {
        k = stable_like(d, s, amp);
      }
    } else if (form == "truncated_stable") {
      k = truncated_stable(d, s, p.value("cutoff", 1.0), p.value("amplitude", 1.0));
    } else if (form == "ring_measure") {
      std::map<int, double> masses;
      if (p.contains("masses")) {
        for (const auto& [key, val] : p.at("masses").items()) masses[std::stoi(key)] = val.get<double>();
      }
      k = ring_measure(d, s, masses);
    } else if (form == "oscillatory") {
      k = oscillatory(d, s, p.value("frequency", 1.0), p.value("depth", 0.5), p.value("amplitude", 1.0));
    } else {
      throw std::invalid_argument("kernel JSON: unknown form '" + form + "'");
    }
    Kernel out = *k;
    if (j.contains("scale")) out = out.scaled(j.at("scale").get<double>());
    if (j.contains("factor")) out = out.multiplied(j.at("factor").get<double>());
    return out;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("kernel JSON: ") + e.what());
  }
}

EllipticityParams::EllipticityParams(double lambda_, double Lambda_, ScalingExponent s_)
    : lambda(lambda_), Lambda(Lambda_), s(s_) {
  if (!(lambda > 0.0 && lambda < Lambda)) throw std::invalid_argument("ellipticity constants need 0 < lambda < Lambda");
}

QuadResult integrate_directional(const Kernel& K, const std::function<double(std::size_t, double)>& F,
                                 double lo, double hi, double test_frequency,
                                 std::span<const double> extra_breaks) {
  const auto& rule = K.sphere();
  auto breaks = K.breakpoints();
  breaks.insert(breaks.end(), extra_breaks.begin(), extra_breaks.end());
  const double freq = test_frequency + K.frequency();
  const int dm1 = K.d() - 1;
  QuadResult total;
  CompensatedSum acc;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    if (K.angular(i) == 0.0) continue;
    auto g = [&](double r) {
      const double k = K.radial(i, r);
      return k == 0.0 ? 0.0 : F(i, r) * k * (dm1 == 0 ? 1.0 : std::pow(r, dm1));
    };
    const auto q = radial_quadrature(g, lo, hi, breaks, freq);
    acc += rule.weights[i] * q.value;
    total.error += rule.weights[i] * q.error;
  }
  total.value = acc.value();
  return total;
}

double upper_bound_ratio(const Kernel& K, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("upper_bound_constant: radii must be positive");
  const double ts = K.s().two_s();
  double r0 = std::ldexp(r, -kInnerOctaves);
  const auto q = integrate_directional(K, [](std::size_t, double x) { return x * x; }, r0, r);
  check_result(q, "upper_bound_constant");
  double head = 0.0;
  const auto& rule = K.sphere();
  for (std::size_t i = 0; i < rule.size(); ++i) {
    head += rule.weights[i] * K.angular(i) * K.near_coefficient() * std::pow(r0, 2.0 - ts) / (2.0 - ts);
  }
  return (q.value + head) * std::pow(r, ts - 2.0);
}

double upper_bound_constant(const Kernel& K, std::span<const double> radii) {
  if (radii.empty()) throw std::invalid_argument("upper_bound_constant: no radii");
  double sup = 0.0;
  for (double r : radii) sup = std::max(sup, upper_bound_ratio(K, r));
  return sup;
}

double nondegeneracy_constant(const Kernel& K, std::span<const double> radii,
                              const std::vector<std::vector<double>>& directions) {
  if (radii.empty() || directions.empty()) throw std::invalid_argument("nondegeneracy_constant: empty radii or directions");
  const auto& rule = K.sphere();
  const double ts = K.s().two_s();
  double inf = kInf;
  for (const auto& e_raw : directions) {
    if (static_cast<int>(e_raw.size()) != K.d()) throw std::invalid_argument("nondegeneracy_constant: direction dimension");
    const double n = std::sqrt(dot_span(e_raw, e_raw));
    if (!(n > 0.0)) throw std::invalid_argument("nondegeneracy_constant: zero direction");
    std::vector<double> cosines(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double c = std::max(0.0, dot_span(rule.directions[i], e_raw) / n);
      cosines[i] = c * c;
    }
    for (double r : radii) {
      if (!(r > 0.0)) throw std::invalid_argument("nondegeneracy_constant: radii must be positive");
      const double r0 = std::ldexp(r, -kInnerOctaves);
      const auto q = integrate_directional(
          K, [&](std::size_t i, double x) { return cosines[i] * x * x; }, r0, r);
      check_result(q, "nondegeneracy_constant");
      double head = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        head += rule.weights[i] * K.angular(i) * cosines[i] * K.near_coefficient() * std::pow(r0, 2.0 - ts) / (2.0 - ts);
      }
      inf = std::min(inf, (q.value + head) * std::pow(r, ts - 2.0));
    }
  }
  return inf;
}

std::vector<TestFunction> coercivity_family(int d, unsigned seed) {
  check_dim(d);
  std::vector<TestFunction> fam;
  for (int i = 0; i < d; ++i) {
    fam.push_back({"v" + std::to_string(i), [i](std::span<const double> v) { return v[i]; }});
  }
  fam.push_back({"|v|^2", [](std::span<const double> v) { return dot_span(v, v); }});
  const double centers[3] = {0.0, 0.3, -0.5};
  const double widths[2] = {0.5, 1.0};
  for (double c : centers) {
    for (double w : widths) {
      fam.push_back({"gauss(" + std::to_string(c) + "," + std::to_string(w) + ")",
                     [c, w, d](std::span<const double> v) {
                       double r2 = 0.0;
                       for (int i = 0; i < d; ++i) {
                         const double ci = i == 0 ? c : (i == 1 ? 0.5 * c : 0.0);
                         r2 += (v[i] - ci) * (v[i] - ci);
                       }
                       return std::exp(-r2 / (w * w));
                     }});
    }
  }
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> freq(-3.0, 3.0), phase(0.0, 2.0 * std::numbers::pi), amp(-1.0, 1.0);
  int n = 0;
  while (fam.size() < 20) {
    std::vector<std::vector<double>> ks(3, std::vector<double>(d));
    std::vector<double> ph(3), am(3);
    for (int m = 0; m < 3; ++m) {
      for (int i = 0; i < d; ++i) ks[m][i] = freq(rng);
      ph[m] = phase(rng);
      am[m] = amp(rng);
    }
    fam.push_back({"trig" + std::to_string(n++), [ks, ph, am](std::span<const double> v) {
                     double acc = 0.0;
                     for (std::size_t m = 0; m < ks.size(); ++m) acc += am[m] * std::cos(dot_span(ks[m], v) + ph[m]);
                     return acc;
                   }});
  }
  return fam;
}

namespace {

struct BallRule {
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;
};

BallRule ball_rule(int d, double R, int v_nodes) {
  BallRule b;
  if (d == 1) {
    const auto& g = gauss_legendre(v_nodes);
    for (int k = 0; k < v_nodes; ++k) {
      b.nodes.push_back({R * g.nodes[k]});
      b.weights.push_back(R * g.weights[k]);
    }
    return b;
  }
  const int nr = std::max(4, v_nodes / (d == 2 ? 5 : 8));
  const auto& g = gauss_legendre(nr);
  const auto& sph = sphere_rule(d);
  const std::size_t stride = d == 2 ? 2 : 1;  // d = 2: every other of the 64 angles
  for (int k = 0; k < nr; ++k) {
    const double rho = 0.5 * R * (g.nodes[k] + 1.0);
    const double wr = 0.5 * R * g.weights[k] * std::pow(rho, d - 1);
    for (std::size_t a = 0; a < sph.size(); a += stride) {
      std::vector<double> v(d);
      for (int i = 0; i < d; ++i) v[i] = rho * sph.directions[a][i];
      b.nodes.push_back(std::move(v));
      b.weights.push_back(wr * sph.weights[a] * static_cast<double>(stride));
    }
  }
  return b;
}

double energy(const Kernel& K, const std::function<double(std::span<const double>)>& phi, double R,
              const CoercivityOptions& opt) {
  const int d = K.d();
  const auto& rule = K.sphere();
  const auto ball = ball_rule(d, R, opt.v_nodes);
  const double ts = K.s().two_s();
  const double h = 1e-6 * R;
  const auto breaks = K.breakpoints();
  CompensatedSum total;
  std::vector<double> w(d), vp(d), vm(d);
  for (std::size_t n = 0; n < ball.nodes.size(); ++n) {
    const auto& v = ball.nodes[n];
    const double fv = phi(v);
    const double vv = dot_span(v, v);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      if (K.angular(i) == 0.0) continue;
      const auto& th = rule.directions[i];
      const double b = dot_span(v, th);
      const double exit = -b + std::sqrt(std::max(0.0, b * b - vv + R * R));
      if (!(exit > 0.0)) continue;
      const double r0 = std::ldexp(exit, -opt.depth);
      auto g = [&](double r) {
        const double k = K.radial(i, r);
        if (k == 0.0) return 0.0;
        for (int c = 0; c < d; ++c) w[c] = v[c] + r * th[c];
        const double diff = phi(w) - fv;
        return diff * diff * k * std::pow(r, d - 1);
      };
      const auto q = radial_quadrature(g, r0, exit, breaks, K.frequency());
      double head = 0.0;
      if (K.near_coefficient() != 0.0) {
        for (int c = 0; c < d; ++c) {
          vp[c] = v[c] + h * th[c];
          vm[c] = v[c] - h * th[c];
        }
        const double grad = (phi(vp) - phi(vm)) / (2.0 * h);
        head = K.angular(i) * K.near_coefficient() * grad * grad * std::pow(r0, 2.0 - ts) / (2.0 - ts);
      }
      total += ball.weights[n] * rule.weights[i] * (q.value + head);
    }
  }
  return total.value();
}

}  // namespace

double coercivity_ratio(const Kernel& K, const std::function<double(std::span<const double>)>& phi,
                        double R, const CoercivityOptions& options) {
  if (!(R > 0.0)) throw std::invalid_argument("coercivity_ratio: R must be positive");
  const double num = energy(K, phi, R, options);
  const double den = energy(Kernel::stable_like(K.d(), K.s()), phi, 0.5 * R, options);
  if (!(den > 0.0)) throw std::invalid_argument("coercivity_ratio: phi is constant on B_{R/2}");
  return num / den;
}

CoercivityTable coercivity_table(const Kernel& K, double R, const std::vector<TestFunction>& family,
                                 const CoercivityOptions& options) {
  CoercivityTable t;
  t.min_ratio = kInf;
  for (const auto& f : family) {
    const double r = coercivity_ratio(K, f.fn, R, options);
    t.ratios.emplace_back(f.name, r);
    if (r < t.min_ratio) {
      t.min_ratio = r;
      t.argmin = f.name;
    }
  }
  return t;
}

double stable_symbol_constant(const ScalingExponent& s) {
  const double a = s.two_s();
  if (std::abs(1.0 - a) < 1e-9) return std::numbers::pi / 2.0;
  return std::tgamma(1.0 - a) * std::cos(std::numbers::pi * a / 2.0) / a;
}

namespace {

// int_x^inf (1 - cos(w r)) (1 + beta sin(j r)) r^{-1-2s} dr
double symbol_tail(double omega, double beta, double j, double x, double two_s) {
  if (std::isinf(x)) return 0.0;
  const double p = 1.0 + two_s;
  double t = power_oscillatory_tail(p, 0.0, x, true) - power_oscillatory_tail(p, omega, x, true);
  if (beta != 0.0 && j != 0.0) {
    t += beta * (power_oscillatory_tail(p, j, x, false) - 0.5 * power_oscillatory_tail(p, j + omega, x, false) -
                 0.5 * power_oscillatory_tail(p, j - omega, x, false));
  }
  return t;
}

// int_0^inf (1 - cos(w r)) c(r) r^{-1-2s} (1 + beta sin(j r)) dr for w > 0
double radial_symbol(const Kernel& K, double omega) {
  const double ts = K.s().two_s();
  const double j = K.frequency(), beta = K.depth();
  double r0 = std::ldexp(1.0, -16) / std::max(omega, j);
  const auto breaks = K.breakpoints();
  if (!breaks.empty()) r0 = std::min(r0, *std::min_element(breaks.begin(), breaks.end()));
  double head = 0.0;
  if (K.near_coefficient() != 0.0) head = K.near_coefficient() * one_minus_cos_head(omega, r0, ts);
  const double rb = std::ldexp(1.0, static_cast<int>(std::ceil(std::log2(8.0 / omega))));
  const double top = std::min(std::max(rb, r0), K.support_radius());
  double body = 0.0;
  if (top > r0) {
    auto g = [&](double r) {
      const double c = K.profile(r);
      if (c == 0.0) return 0.0;
      const double h = std::sin(0.5 * omega * r);
      return 2.0 * h * h * c * std::pow(r, -1.0 - ts) * K.modulation(r);
    };
    const auto q = radial_quadrature(g, r0, top, breaks, omega + j);
    check_result(q, "symbol");
    body = q.value;
  }
  double tail = 0.0;
  if (K.support_radius() > top) {
    // Profile is piecewise constant: integrate each piece beyond `top` in closed form.
    std::vector<double> cuts{top};
    for (double b : breaks) {
      if (b > top) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(kInf);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k], b = cuts[k + 1];
      const double c = K.profile(std::isinf(b) ? 2.0 * a + 1.0 : 0.5 * (a + b));
      if (c == 0.0) continue;
      tail += c * (symbol_tail(omega, beta, j, a, ts) - symbol_tail(omega, beta, j, b, ts));
    }
  }
  return head + body + tail;
}

}  // namespace

double symbol(const Kernel& K, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != K.d()) throw std::invalid_argument("symbol: frequency dimension mismatch");
  if (K.is_zero()) return 0.0;
  const auto& rule = K.sphere();
  CompensatedSum acc;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const std::size_t k = rule.antipode[i];
    if (k < i) continue;  // +theta and -theta share the radial integral
    const double omega = std::abs(dot_span(rule.directions[i], xi));
    const double weight = rule.weights[i] * K.angular(i) + (k != i ? rule.weights[k] * K.angular(k) : 0.0);
    if (omega == 0.0 || weight == 0.0) continue;
    acc += weight * radial_symbol(K, omega);
  }
  return acc.value();
}

double symbol(const Kernel& K, double xi) {
  const double x[1] = {xi};
  return symbol(K, std::span<const double>(x, 1));
}

std::vector<RingMoment> ring_moments(const Kernel& K, int k_min, int k_max) {
  if (k_min > k_max) throw std::invalid_argument("ring_moments: empty ring range");
  std::vector<RingMoment> out;
  for (int k = k_min; k <= k_max; ++k) {
    const double lo = std::ldexp(1.0, k - 1), hi = std::ldexp(1.0, k);
    const auto m = integrate_directional(K, [](std::size_t, double) { return 1.0; }, lo, hi);
    const auto m2 = integrate_directional(K, [](std::size_t, double r) { return r * r; }, lo, hi);
    out.push_back({k, m.value, m2.value});
  }
  return out;
}

void write_ring_moments_csv(std::ostream& os, const std::vector<RingMoment>& moments) {
  os << "k,mass,second_moment\n";
  const auto prec = os.precision(17);
  for (const auto& m : moments) os << m.k << ',' << m.mass << ',' << m.second_moment << '\n';
  os.precision(prec);
}

double ring_upper_bound(const std::vector<RingMoment>& moments, const ScalingExponent& s) {
  auto sorted = moments;
  std::sort(sorted.begin(), sorted.end(), [](const RingMoment& a, const RingMoment& b) { return a.k < b.k; });
  double cum = 0.0, sup = 0.0;
  for (const auto& m : sorted) {
    cum += m.second_moment;
    sup = std::max(sup, cum * std::pow(2.0, -m.k * (2.0 - s.two_s())));
  }
  return sup;
}

std::vector<AnnularTest> weak_star_tests(int d) {
  check_dim(d);
  const std::pair<double, double> annuli[] = {{0.5, 1.0}, {0.5, 2.0}, {1.0, 3.0}, {0.25, 4.0}, {2.0, 6.0}};
  std::vector<AnnularTest> out;
  for (const auto& [a, b] : annuli) {
    auto bump = [a, b](double r) {
      const double u = (2.0 * r - (a + b)) / (b - a);
      return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
    };
    const std::string tag = "[" + std::to_string(a) + "," + std::to_string(b) + "]";
    out.push_back({"bump" + tag, [bump](std::span<const double> w) { return bump(std::sqrt(dot_span(w, w))); }, a, b});
    out.push_back({"tilted" + tag,
                   [bump](std::span<const double> w) {
                     const double r = std::sqrt(dot_span(w, w));
                     return bump(r) * (1.0 + w[0] / r) * r;
                   },
                   a, b});
  }
  return out;
}

double pair_with(const Kernel& K, const AnnularTest& phi) {
  if (!(phi.inner > 0.0) || !(phi.outer > phi.inner)) {
    throw std::invalid_argument("weak-* test support must be an annulus away from the origin");
  }
  const auto& rule = K.sphere();
  std::vector<double> w(K.d());
  const auto q = integrate_directional(
      K,
      [&](std::size_t i, double r) {
        for (int c = 0; c < K.d(); ++c) w[c] = r * rule.directions[i][c];
        return phi.fn(w);
      },
      phi.inner, phi.outer, 8.0 * std::numbers::pi / (phi.outer - phi.inner));
  return q.value;
}

double weak_star_gap(const Kernel& K1, const Kernel& K2, const std::vector<AnnularTest>& tests) {
  require_compatible(K1, K2);
  double gap = 0.0;
  for (const auto& t : tests) gap = std::max(gap, std::abs(pair_with(K1, t) - pair_with(K2, t)));
  return gap;
}

KernelFamily KernelFamily::constant(Kernel K0) {
  KernelFamily f(K0);
  f.generator_ = [K0](const Point&) { return K0; };
  f.amplitude_ = [](const Point&) { return 1.0; };
  f.description = "constant";
  return f;
}

KernelFamily KernelFamily::modulated(Kernel K0, std::function<double(const Point&)> a, std::string description) {
  if (!a) throw std::invalid_argument("modulated family: missing amplitude");
  const double a0 = a(Point::zero(K0.d()));
  KernelFamily f(K0.multiplied(a0));
  f.generator_ = [K0, a](const Point& z) { return K0.multiplied(a(z)); };
  f.amplitude_ = [a, a0](const Point& z) { return a(z) / a0; };
  f.description = std::move(description);
  return f;
}

KernelFamily KernelFamily::custom(std::function<Kernel(const Point&)> generator, Kernel reference,
                                  std::string description) {
  KernelFamily f(std::move(reference));
  f.generator_ = std::move(generator);
  f.description = std::move(description);
  return f;
}

Kernel KernelFamily::at(const Point& z) const { return generator_(z); }

std::optional<double> KernelFamily::amplitude(const Point& z) const {
  if (!amplitude_) return std::nullopt;
  return amplitude_(z);
}

namespace {

QuadResult integrate_difference(const Kernel& K1, const Kernel& K2, const std::function<double(double)>& F,
                                double lo, double hi) {
  require_compatible(K1, K2);
  const auto& rule = K1.sphere();
  const auto breaks = merged_breaks(K1, K2);
  const double freq = std::max(K1.frequency(), K2.frequency());
  const int dm1 = K1.d() - 1;
  QuadResult total;
  CompensatedSum acc;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    auto g = [&](double r) {
      const double diff = std::abs(K1.radial(i, r) - K2.radial(i, r));
      return diff == 0.0 ? 0.0 : F(r) * diff * std::pow(r, dm1);
    };
    const auto q = radial_quadrature(g, lo, hi, breaks, freq);
    acc += rule.weights[i] * q.value;
    total.error += rule.weights[i] * q.error;
  }
  total.value = acc.value();
  return total;
}

// sum_i w_i |a1_i c1 - a2_i c2| for the near-origin coefficients
double near_difference(const Kernel& K1, const Kernel& K2) {
  const auto& rule = K1.sphere();
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    acc += rule.weights[i] *
           std::abs(K1.angular(i) * K1.near_coefficient() - K2.angular(i) * K2.near_coefficient());
  }
  return acc;
}

}  // namespace

double difference_moment(const Kernel& K1, const Kernel& K2, double r) {
  const double ts = K1.s().two_s();
  const double r0 = std::ldexp(r, -kInnerOctaves);
  const auto q = integrate_difference(K1, K2, [](double x) { return x * x; }, r0, r);
  return q.value + near_difference(K1, K2) * std::pow(r0, 2.0 - ts) / (2.0 - ts);
}

double difference_near(const Kernel& K1, const Kernel& K2, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("difference_near: alpha must be positive");
  const double ts = K1.s().two_s();
  const double r0 = std::ldexp(1.0, -kInnerOctaves);
  const auto q = integrate_difference(K1, K2, [&](double x) { return std::pow(x, ts + alpha); }, r0, 1.0);
  return q.value + near_difference(K1, K2) * std::pow(r0, alpha) / alpha;
}

double difference_far(const Kernel& K1, const Kernel& K2) {
  require_compatible(K1, K2);
  const double ts = K1.s().two_s();
  const double p = 1.0 + ts;
  const bool same_mod = K1.depth() == K2.depth() && K1.frequency() == K2.frequency();
  const double f1 = K1.far_coefficient(), f2 = K2.far_coefficient();
  const bool unbounded = f1 != 0.0 || f2 != 0.0;
  double R = std::ldexp(1.0, 20);
  if (unbounded && same_mod) {
    R = 16.0;
  } else if (std::max(K1.frequency(), K2.frequency()) > 0.0) {
    R = std::max(16.0, 4096.0 / std::max(K1.frequency(), K2.frequency()));
  }
  const double top = std::min(R, std::max({K1.support_radius(), K2.support_radius(), 1.0}));
  double body = top > 1.0 ? integrate_difference(K1, K2, [](double) { return 1.0; }, 1.0, top).value : 0.0;
  if (!unbounded || top < R) return body;
  const auto& rule = K1.sphere();
  double tail = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double c1 = K1.angular(i) * f1, c2 = K2.angular(i) * f2;
    if (same_mod) {
      const double beta = K1.depth(), j = K1.frequency();
      double t = power_oscillatory_tail(p, 0.0, R, true);
      if (beta != 0.0 && j != 0.0) t += beta * power_oscillatory_tail(p, j, R, false);
      tail += rule.weights[i] * std::abs(c1 - c2) * t;
    } else {
      // Differently modulated tails: bound by the sum of envelopes.
      tail += rule.weights[i] * (std::abs(c1) * (1.0 + K1.depth()) + std::abs(c2) * (1.0 + K2.depth())) *
              std::pow(R, -ts) / ts;
    }
  }
  return body + tail;
}

HolderModulusReport holder_modulus(const KernelFamily& F, const std::vector<std::pair<Point, Point>>& pairs,
                                   std::span<const double> radii, double alpha, const ScalingExponent& s) {
  if (pairs.empty() || radii.empty()) throw std::invalid_argument("holder_modulus: no pairs or radii");
  if (!(alpha > 0.0)) throw std::invalid_argument("holder_modulus: alpha must be positive");
  HolderModulusReport rep;
  double near_sup = 0.0, far_sup = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& [z1, z2] = pairs[p];
    const double dl = left_distance(z1, z2, s);
    if (!(dl > 0.0)) throw std::invalid_argument("holder_modulus: pairs must be distinct");
    const double da = std::pow(dl, alpha);
    const Kernel K1 = F.at(z1), K2 = F.at(z2);
    for (double r : radii) {
      if (!(r > 0.0)) throw std::invalid_argument("holder_modulus: radii must be positive");
      const double v = difference_moment(K1, K2, r) * std::pow(r, s.two_s() - 2.0) / da;
      if (v > rep.A0) {
        rep.A0 = v;
        rep.witness_pair = p;
        rep.witness_radius = r;
      }
    }
    near_sup = std::max(near_sup, difference_near(K1, K2, alpha) / da);
    far_sup = std::max(far_sup, difference_far(K1, K2) / da);
  }
  if (rep.A0 > 0.0) {
    rep.near_constant = near_sup / rep.A0;
    rep.far_constant = far_sup / rep.A0;
  }
  return rep;
}

}  // namespace kinetic
