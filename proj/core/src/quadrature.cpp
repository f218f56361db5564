#include "kinetic/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "kinetic/error.hpp"

namespace kinetic {

namespace {

GaussRule compute_gauss(int n) {
  GaussRule g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = w;
    g.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;
  return g;
}

constexpr int kHigh = 32;
constexpr int kLow = 20;
constexpr std::size_t kPanelCap = 1u << 20;
constexpr double kSeriesStart = 64.0;

SphereRule make_sphere(int d) {
  SphereRule r;
  r.d = d;
  if (d == 1) {
    r.directions = {{1.0}, {-1.0}};
    r.weights = {1.0, 1.0};
    r.antipode = {1, 0};
  } else if (d == 2) {
    const int n = 64;
    for (int i = 0; i < n; ++i) {
      const double a = 2.0 * std::numbers::pi * i / n;
      r.directions.push_back({std::cos(a), std::sin(a)});
      r.weights.push_back(2.0 * std::numbers::pi / n);
      r.antipode.push_back(static_cast<std::size_t>((i + n / 2) % n));
    }
  } else if (d == 3) {
    const auto& g = gauss_legendre(8);
    const int na = 16;
    for (int p = 0; p < 8; ++p) {
      const double c = g.nodes[p];
      const double sn = std::sqrt(1.0 - c * c);
      for (int a = 0; a < na; ++a) {
        const double phi = 2.0 * std::numbers::pi * a / na;
        r.directions.push_back({sn * std::cos(phi), sn * std::sin(phi), c});
        r.weights.push_back(g.weights[p] * 2.0 * std::numbers::pi / na);
        r.antipode.push_back(static_cast<std::size_t>((7 - p) * na + (a + na / 2) % na));
      }
    }
  } else {
    throw std::invalid_argument("sphere_rule: dimension must be 1, 2 or 3");
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
  return it->second;
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double SphereRule::area() const noexcept {
  double a = 0.0;
  for (double w : weights) a += w;
  return a;
}

const SphereRule& sphere_rule(int d) {
  static const SphereRule r1 = make_sphere(1);
  static const SphereRule r2 = make_sphere(2);
  static const SphereRule r3 = make_sphere(3);
  switch (d) {
    case 1: return r1;
    case 2: return r2;
    case 3: return r3;
    default: throw std::invalid_argument("sphere_rule: dimension must be 1, 2 or 3");
  }
}

QuadResult radial_quadrature(const std::function<double(double)>& g, double lo, double hi,
                             std::span<const double> breakpoints, double frequency) {
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("radial_quadrature: need 0 < lo <= hi < inf");
  }
  if (hi == lo) return {};
  std::vector<double> cuts{lo, hi};
  for (int e = static_cast<int>(std::ceil(std::log2(lo))); std::ldexp(1.0, e) < hi; ++e) {
    const double c = std::ldexp(1.0, e);
    if (c > lo) cuts.push_back(c);
  }
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto& gh = gauss_legendre(kHigh);
  const auto& gl = gauss_legendre(kLow);
  CompensatedSum total;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    const double periods = std::abs(frequency) * (b - a) / (2.0 * std::numbers::pi);
    const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(periods)));
    if (panels > kPanelCap) throw ConvergenceError("radial_quadrature: oscillation too fast for the panel cap");
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double pa = a + h * static_cast<double>(p);
      const double pb = p + 1 == panels ? b : pa + h;
      const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
      CompensatedSum qh, ql;
      for (int k = 0; k < kHigh; ++k) qh += gh.weights[k] * g(mid + half * gh.nodes[k]);
      for (int k = 0; k < kLow; ++k) ql += gl.weights[k] * g(mid + half * gl.nodes[k]);
      total += half * qh.value();
      err += half * std::abs(qh.value() - ql.value());
    }
  }
  return {total.value(), err};
}

double power_oscillatory_tail(double p, double kappa, double R, bool cosine) {
  if (!(R > 0.0)) throw std::invalid_argument("power_oscillatory_tail: R must be positive");
  if (kappa == 0.0) {
    if (!cosine) return 0.0;
    if (!(p > 1.0)) throw DivergenceError("power_oscillatory_tail: non-oscillatory tail with p <= 1 diverges");
    return std::pow(R, 1.0 - p) / (p - 1.0);
  }
  if (!(p > 0.0)) throw DivergenceError("power_oscillatory_tail: p must be positive");
  const double sign = (!cosine && kappa < 0.0) ? -1.0 : 1.0;
  const double k = std::abs(kappa);
  const double R2 = std::max(R, kSeriesStart / k);
  double head = 0.0;
  if (R2 > R) {
    auto g = [&](double r) { return (cosine ? std::cos(k * r) : std::sin(k * r)) * std::pow(r, -p); };
    head = radial_quadrature(g, R, R2, {}, k).value;
  }
  // int_{R2}^inf e^{i k r} r^{-p} dr ~ (i/k) e^{i k R2} R2^{-p} sum_n (p)_n (-i/(k R2))^n
  using C = std::complex<double>;
  const C step(0.0, -1.0 / (k * R2));
  C term(1.0, 0.0), series(0.0, 0.0);
  double last = 2.0;
  for (int n = 0; n < 80; ++n) {
    const double mag = std::abs(term);
    if (mag > last) break;  // asymptotic series started to diverge
    series += term;
    if (mag < 1e-18) break;
    last = mag;
    term *= (p + n) * step;
  }
  const C tail = C(0.0, 1.0 / k) * std::exp(C(0.0, k * R2)) * std::pow(R2, -p) * series;
  return sign * (head + (cosine ? tail.real() : tail.imag()));
}

double one_minus_cos_head(double omega, double r0, double two_s) {
  if (r0 <= 0.0 || omega == 0.0) return 0.0;
  const double u = omega * r0;
  // sum_{n>=1} (-1)^{n+1} omega^{2n} r0^{2n-2s} / ((2n)! (2n-2s))
  CompensatedSum acc;
  double fact = 1.0, upow = 1.0;
  for (int n = 1; n < 40; ++n) {
    fact *= (2.0 * n - 1.0) * (2.0 * n);
    upow *= u * u;
    const double term = upow / (fact * (2.0 * n - two_s));
    acc += (n % 2 == 1 ? term : -term);
    if (term < 1e-18 * std::abs(acc.value())) break;
  }
  return acc.value() * std::pow(r0, -two_s);
}

}  // namespace kinetic
