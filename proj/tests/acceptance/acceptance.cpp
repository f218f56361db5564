// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   kinetic_acceptance            all criteria
//   kinetic_acceptance 3 5        selected criteria

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "kinetic/distance.hpp"
#include "kinetic/harness.hpp"
#include "kinetic/holder.hpp"
#include "kinetic/kernel.hpp"
#include "kinetic/nonlocal.hpp"
#include "kinetic/parallel.hpp"
#include "kinetic/spectral.hpp"

using namespace kinetic;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // runtime limit, 0 = none
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Point random_point(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Point z = Point::zero(d);
  z.t = u(rng);
  for (int i = 0; i < d; ++i) {
    z.x[i] = u(rng);
    z.v[i] = u(rng);
  }
  return z;
}

int lattice(double xi) { return static_cast<int>(std::lround(xi * kDefaultVelocityPeriod / (2.0 * kPi))); }

double at(const SpectralField& f, double x, double v) {
  const double xs[1] = {x}, vs[1] = {v};
  return f(xs, vs);
}

std::vector<Axis> box(double t0, double t1, int nt, double xh, int nx, double vh, int nv) {
  return {{t0, t1, nt}, {-xh, xh, nx}, {-vh, vh, nv}};
}

// ---------------------------------------------------------------------------------------------

Outcome metric_suite() {
  constexpr int kTriples = 10000;
  const double tol = kDefaultDistanceTol;
  std::atomic<long> invariance_bad{0}, scaling_bad{0}, triangle_bad{0};
  double worst_inv = 0.0, worst_scale = 0.0;
  std::mutex mu;
  for (double sv : {0.25, 0.5, 0.75}) {
    const ScalingExponent s(sv);
    for (int d : {1, 2}) {
      std::vector<std::array<Point, 4>> pts(kTriples);
      std::vector<double> R(kTriples);
      std::mt19937_64 rng(1000 * d + static_cast<unsigned>(sv * 100));
      std::uniform_real_distribution<double> ur(0.5, 2.0);
      for (int i = 0; i < kTriples; ++i) {
        pts[i] = {random_point(rng, d), random_point(rng, d), random_point(rng, d), random_point(rng, d)};
        R[i] = ur(rng);
      }
      parallel_for(kTriples, [&](std::size_t i) {
        const auto& [z1, z2, z3, g] = pts[i];
        const double d12 = left_distance(z1, z2, s, tol), d13 = left_distance(z1, z3, s, tol),
                     d23 = left_distance(z2, z3, s, tol);
        const double inv = std::abs(left_distance(compose(g, z1), compose(g, z2), s, tol) - d12);
        const double sc = std::abs(left_distance(scale(R[i], z1, s), scale(R[i], z2, s), s, tol) - R[i] * d12);
        if (inv > 3 * tol) ++invariance_bad;
        if (sc > 3 * tol) ++scaling_bad;
        const double p = sv >= 0.5 ? 1.0 : s.two_s();
        if (std::pow(d13, p) > std::pow(d12, p) + std::pow(d23, p) + 3 * tol) ++triangle_bad;
        std::lock_guard lock(mu);
        worst_inv = std::max(worst_inv, inv);
        worst_scale = std::max(worst_scale, sc);
      });
    }
  }
  const bool ok = invariance_bad == 0 && scaling_bad == 0 && triangle_bad == 0;
  return {ok, fmt("6 x 1e4 triples; worst invariance %.2e, worst scaling %.2e, triangle violations %ld", worst_inv,
                  worst_scale, triangle_bad.load())};
}

Outcome kernel_integrals() {
  const std::vector<double> radii{0.25, 1.0, 4.0};
  const double ub = upper_bound_constant(Kernel::stable_like(1, ScalingExponent(0.5)), radii);
  const double nd = nondegeneracy_constant(Kernel::stable_like(1, ScalingExponent(0.25)), radii, {{1.0}, {-1.0}});
  double m1 = 0.0;
  for (const auto& r : ring_moments(Kernel::stable_like(1, ScalingExponent(0.5)), 0, 2)) {
    if (r.k == 1) m1 = r.mass;
  }
  const bool ok = std::abs(ub - 2.0) <= 1e-8 && std::abs(nd - 2.0 / 3.0) <= 1e-8 && std::abs(m1 - 1.0) <= 1e-8;
  return {ok, fmt("upper bound %.12f, nondegeneracy %.12f, ring mass %.12f", ub, nd, m1)};
}

Outcome symbol_oracle() {
  const Kernel K = Kernel::stable_like(1, ScalingExponent(0.5));
  double worst = 0.0;
  for (double xi : {0.5, 1.0, 2.0, 8.0}) worst = std::max(worst, std::abs(symbol(K, xi) / (kPi * xi) - 1.0));
  return {worst <= 1e-4, fmt("max relative error %.2e over xi in {1/2,1,2,8}", worst)};
}

Outcome operator_oracle() {
  double v2_err = 0.0, cos_err = 0.0, affine = 0.0;
  for (double sv : {0.25, 0.5, 0.75}) {
    const ScalingExponent s(sv);
    const Kernel T = Kernel::truncated_stable(1, s, 1.0);
    auto sq = [](std::span<const double> v) { return v[0] * v[0]; };
    for (double v0 : {0.0, 0.7, -3.0}) {
      const double x[1] = {v0};
      v2_err = std::max(v2_err, std::abs(apply_pointwise(T, sq, x, {}, Majorant::constant(0.0, s)).value -
                                         1.0 / (1.0 - sv)));
    }
    const Kernel K = Kernel::stable_like(1, s);
    const double psi1 = symbol(K, 1.0);
    auto c = [](std::span<const double> v) { return std::cos(v[0]); };
    for (double v0 : {0.0, 0.3, 2.0, -1.1}) {
      const double x[1] = {v0};
      cos_err = std::max(cos_err, std::abs(apply_pointwise(K, c, x, {}, Majorant::constant(1.0, s)).value +
                                           psi1 * std::cos(v0)));
    }
    OperatorOptions o;
    o.tail_model = TailModel::second_difference;
    auto a1 = [](std::span<const double> v) { return 3.0 - 2.0 * v[0]; };
    const double x1[1] = {0.4};
    affine = std::max(affine, std::abs(apply_pointwise(K, a1, x1, {}, Majorant::constant(0.0, s), o).value));
    const Kernel K2 = Kernel::oscillatory(2, s, 4.0);
    auto a2 = [](std::span<const double> v) { return 1.0 + v[0] - 0.5 * v[1]; };
    const double x2[2] = {0.1, -0.7};
    affine = std::max(affine, std::abs(apply_pointwise(K2, a2, x2, {}, Majorant::constant(0.0, s), o).value));
  }
  // affine data: the symmetrized integrand is zero up to the rounding of f(v0+w) - f(v0)
  const bool ok = v2_err <= 1e-6 && cos_err <= 1e-4 && affine <= 1e-11;
  return {ok, fmt("L v^2 err %.2e, L cos err %.2e, affine |L| %.2e", v2_err, cos_err, affine)};
}

Outcome solver_exactness() {
  const Kernel K = Kernel::stable_like(1, ScalingExponent(0.5));
  const auto none = SourceSpec::none(1);
  double closed = 0.0;
  const auto c0 = SpectralField::cosine(1, {0}, {lattice(1.0)});
  for (double t : {0.25, 1.0, 3.0}) {
    const auto f = solve(c0, K, none, t);
    for (double v : {-1.0, 0.0, 0.7}) closed = std::max(closed, std::abs(at(f, 0.3, v) - std::exp(-kPi * t) * std::cos(v)));
  }
  const auto c1 = SpectralField::cosine(1, {1}, {lattice(1.0)});
  const auto f1 = solve(c1, K, none, 1.0);
  for (double x : {0.0, 1.2}) {
    for (double v : {-0.5, 2.0}) closed = std::max(closed, std::abs(at(f1, x, v) - std::exp(-kPi / 2) * std::cos(x)));
  }

  // semigroup on the quadrature path
  const Kernel Ks = Kernel::stable_like(1, ScalingExponent(0.3), 1.5);
  const auto r0 = SpectralField::random(1, 2, 4, 5);
  SourceSpec c;
  c.add_cosine({3}, 0.4, 1.0);
  const double h = default_time_step(r0);
  SolverOptions q;
  q.closed_form = false;
  const auto once = solve(r0, Ks, c, 57 * h, q);
  const auto twice = solve(solve(r0, Ks, c, 17 * h, q), Ks, c, 40 * h, q);
  double semigroup = 0.0;
  for (const auto& [k, a] : once.modes()) semigroup = std::max(semigroup, std::abs(twice.amplitude(k) - a) / std::max(1.0, std::abs(a)));

  // residual with the default 5-point stencil
  PhaseGrid grid{1, {{-2.0, 2.0, 7}}, {{-2.0, 2.0, 7}}};
  auto stencil = [&](const SpectralField& f0, const Kernel& Kr, const SourceSpec& src, double t) {
    std::vector<SpectralField> out;
    const double dt = default_time_step(f0);
    for (int j = -2; j <= 2; ++j) out.push_back(solve(f0, Kr, src, t + j * dt));
    return out;
  };
  double residual = 0.0;
  residual = std::max(residual, residual_check(stencil(c1, K, none, 0.5), K, none, grid));
  residual = std::max(residual, residual_check(stencil(c0, K, none, 1.0), K, none, grid));
  SourceSpec forced;
  forced.add_cosine({lattice(1.0)}, 0.5, 1.0);
  residual = std::max(residual, residual_check(stencil(c0, K, forced, 0.5), K, forced, grid));
  const Kernel K2 = Kernel::stable_like(2, ScalingExponent(0.75), 1.0,
                                        [](std::span<const double> e) { return 1.0 + e[0] * e[0]; });
  const auto g0 = SpectralField::cosine(2, {1, 0}, {lattice(0.5), lattice(-1.0)});
  PhaseGrid grid2{2, {{-2.0, 2.0, 5}, {-2.0, 2.0, 5}}, {{-2.0, 2.0, 5}, {-2.0, 2.0, 5}}};
  residual = std::max(residual, residual_check(stencil(g0, K2, SourceSpec::none(2), 0.5), K2, SourceSpec::none(2), grid2));

  const double tol = SolverOptions{}.quad_tol;
  const bool ok = closed <= 1e-8 && semigroup <= 2 * tol && residual <= 1e-4;
  return {ok, fmt("closed-form err %.2e, semigroup %.2e (limit %.0e), residual %.2e", closed, semigroup, 2 * tol, residual)};
}

Outcome holder_calibration() {
  const ScalingExponent half(0.5);
  // |v|^{1/2} on a v-line, about v = 0
  const auto line = GridField::sample(1, box(0, 0, 1, 0, 1, 1, 161), [](const Point& z) {
                      return std::sqrt(std::abs(z.v[0]));
                    }).to_sampled();
  const double root = seminorm(line, {Point::zero(1)}, 0.5, half).seminorm;
  const double root_err = std::abs(root / std::sqrt(2.0) - 1.0);

  // kinetic polynomials of degree below the exponent
  const auto axes = box(-1, 0, 7, 1, 7, 1, 7);
  const auto poly = GridField::sample(1, axes, [](const Point& z) {
                      return 1.0 + 2.0 * z.t - z.v[0] + 0.5 * z.v[0] * z.v[0] + z.x[0] - 0.3 * z.t * z.v[0];
                    }).to_sampled();
  const double poly_sn = seminorm(poly, default_base_points(poly, 24), 2.5, half).seminorm;

  // interpolation inequality on several fields
  int holds = 0, total = 0;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto ax5 = box(-1, 0, 5, 1, 5, 1, 5);
  std::vector<SampledField> fields;
  fields.push_back(GridField::sample(1, ax5, [&](const Point& z) { return std::pow(knorm(z, half), 0.9); }).to_sampled());
  for (int trial = 0; trial < 4; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng);
    fields.push_back(GridField::sample(1, ax5, [=](const Point& z) {
                       return std::sin(3 * a * z.t + b * z.x[0]) + std::cos(2 * c * z.v[0] + a);
                     }).to_sampled());
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto bases = i == 0 ? std::vector<Point>{Point::zero(1)} : default_base_points(fields[i], 15);
    const auto r = interpolation_check(fields[i], bases, 0.2, 0.5, 0.9, half);
    holds += r.holds ? 1 : 0;
    ++total;
  }
  const bool ok = root_err <= 0.02 && poly_sn < 1e-8 && holds == total;
  return {ok, fmt("[|v|^1/2] = %.6f (sqrt 2 %+.2f%%), polynomial seminorm %.1e, interpolation %d/%d", root,
                  100 * (root / std::sqrt(2.0) - 1.0), poly_sn, holds, total)};
}

Outcome derivative_lemma() {
  const ScalingExponent s(0.5);
  const double alpha = 2.5;
  std::vector<std::pair<const char*, PhaseFunction>> fields{
      {"sin(t+x)cos v", [](const Point& z) { return std::sin(z.t + z.x[0]) * std::cos(z.v[0]); }},
      {"exp(t/2)cos(x-v^2/2)", [](const Point& z) { return std::exp(0.5 * z.t) * std::cos(z.x[0] - 0.5 * z.v[0] * z.v[0]); }},
  };
  const DerivativeKind kinds[] = {DerivativeKind::transport, DerivativeKind::dx, DerivativeKind::dv};
  double worst = 0.0;
  std::string where;
  for (const auto& [name, f] : fields) {
    for (auto D : kinds) {
      double C[2];
      int level = 0;
      for (int n : {9, 17}) {
        const auto g = GridField::sample(1, box(-1, 0, n, 1, n, 1, n), f);
        const auto fs = g.to_sampled();
        const auto df = derivative_field(g, D).to_sampled();
        const double top = seminorm(fs, default_base_points(fs, 24), alpha, s).seminorm;
        const double low = seminorm(df, default_base_points(df, 24), alpha - derivative_degree(D, s), s).seminorm;
        C[level++] = low / top;
      }
      const double var = std::abs(C[1] - C[0]) / std::max(C[0], C[1]);
      if (var > worst) {
        worst = var;
        where = std::string(name) + (D == DerivativeKind::transport ? " transport" : D == DerivativeKind::dx ? " dx" : " dv");
      }
    }
  }
  return {worst < 0.5, fmt("max variation of the constant %.1f%% (%s)", 100 * worst, where.c_str())};
}

Outcome weak_star() {
  const ScalingExponent half(0.5);
  const Kernel K = Kernel::stable_like(1, half);
  const auto tests = weak_star_tests(1);
  double prev = INFINITY, Lambda = 0.0;
  bool monotone = true;
  std::vector<double> radii;
  for (int k = -10; k <= 10; ++k) radii.push_back(std::ldexp(1.0, k));
  std::string gaps;
  for (double j : {1.0, 4.0, 16.0, 64.0}) {
    const Kernel Kj = Kernel::oscillatory(1, half, j, 0.5);
    const double g = weak_star_gap(Kj, K, tests);
    monotone = monotone && g < prev;
    prev = g;
    Lambda = std::max(Lambda, upper_bound_constant(Kj, radii));
    gaps += fmt("%.1e ", g);
  }
  const double limit = ring_upper_bound(ring_moments(K, -40, 10), half);
  const bool ok = monotone && limit <= Lambda * (1 + 1e-12);
  return {ok, fmt("gaps %s; limit ring bound %.6f <= sequence bound %.6f", gaps.c_str(), limit, Lambda)};
}

Outcome frozen_split() {
  double residual = 0.0, constant_A = 0.0;
  const CutoffSpec eta(0.75, 1.0);
  OperatorOptions o;
  o.far_radius = 65536.0;
  for (double sv : {0.5, 0.75}) {
    const ScalingExponent s(sv);
    const Kernel K0 = Kernel::stable_like(1, s);
    const double psi1 = symbol(K0, 1.0);
    auto fam = KernelFamily::modulated(K0, [](const Point& p) { return 1.0 + 0.25 * std::sin(p.t); });
    auto f = [psi1](const Point& p) {
      return std::exp(-psi1 * (p.t + 0.25 * (1.0 - std::cos(p.t)))) * std::cos(p.v[0]);
    };
    auto zero = [](const Point&) { return 0.0; };
    const Point pts[] = {Point(0.1, 0.3, 0.2), Point(-0.4, -0.2, -0.5), Point(0.7, 0.0, 0.6)};
    std::vector<double> res(3), cA(3);
    parallel_for(3, [&](std::size_t i) {
      res[i] = std::abs(freeze_split_residual(fam, f, zero, Majorant::constant(1.0, s), eta, pts[i], 1e-3, o).residual);
      auto g = [](const Point& p) { return std::cos(p.x[0] + p.v[0]); };
      cA[i] = std::abs(freeze_split(KernelFamily::constant(K0), g, Majorant::constant(1.0, s), eta, pts[i]).A);
    });
    for (int i = 0; i < 3; ++i) {
      residual = std::max(residual, res[i]);
      constant_A = std::max(constant_A, cA[i]);
    }
  }
  const auto levels = split_lemma_constants(0.5, {9, 17, 33});
  double amin = INFINITY, amax = 0.0, bmin = INFINITY, bmax = 0.0;
  for (const auto& l : levels) {
    amin = std::min(amin, l.A_constant);
    amax = std::max(amax, l.A_constant);
    bmin = std::min(bmin, l.B_constant);
    bmax = std::max(bmax, l.B_constant);
  }
  const bool bounded = amin > 0.0 && bmin > 0.0 && amax <= 2 * amin && bmax <= 2 * bmin;
  const bool ok = residual <= 1e-5 && constant_A == 0.0 && bounded;
  return {ok, fmt("residual %.2e, constant-family |A| %.1e, C_A in [%.3g, %.3g], C_B in [%.3g, %.3g]", residual,
                  constant_A, amin, amax, bmin, bmax)};
}

Outcome schauder_sweep() {
  const auto rep = run_schauder_sweep(HarnessConfig{});
  double worst = 0.0;
  int finite = 0;
  for (const auto& r : rep.records) {
    worst = std::max(worst, r.relative_change);
    finite += r.finite ? 1 : 0;
  }
  double control = 0.0;
  for (double sv : {0.25, 0.5, 0.75}) control = std::max(control, polynomial_control(sv, 0.8 * std::min(1.0, 2 * sv), 9));
  const bool ok = rep.records.size() == 15 && rep.all_stable() && control <= 1e-10;
  return {ok, fmt("%zu configurations, %d finite, max change %.1f%%, polynomial numerator %.1e, sweep %.0f s",
                  rep.records.size(), finite, 100 * worst, control, rep.seconds)};
}

Outcome liouville() {
  double worst = 0.0;
  int cases = 0;
  const std::vector<Axis> axes{{-1.0, 0.0, 5}, {-1.0, 1.0, 5}, {-1.0, 1.0, 5}};
  for (double sv : {0.25, 0.5, 0.75}) {
    for (const auto& c : liouville_cases(ScalingExponent(sv))) {
      worst = std::max(worst, liouville_residual(c.p, c.K, c.xi, axes));
      ++cases;
    }
  }
  return {worst <= 1e-8, fmt("%d cases, max residual %.1e", cases, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "metric suite", 60, metric_suite},
      {2, "closed-form kernel integrals", 0, kernel_integrals},
      {3, "symbol oracle", 10, symbol_oracle},
      {4, "operator oracle", 0, operator_oracle},
      {5, "solver exactness", 60, solver_exactness},
      {6, "Hoelder calibration", 0, holder_calibration},
      {7, "derivative lemma", 0, derivative_lemma},
      {8, "weak-* machinery", 0, weak_star},
      {9, "frozen-coefficient identity", 0, frozen_split},
      {10, "Schauder ratio sweep", 900, schauder_sweep},
      {11, "Liouville residuals", 0, liouville},
  };
  std::vector<int> pick;
  for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!pick.empty() && std::find(pick.begin(), pick.end(), c.id) == pick.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds > 0 && sec > c.budget_seconds) {
      r.pass = false;
      r.detail += fmt(" [over the %.0f s limit]", c.budget_seconds);
    }
    std::printf("%s  %2d %-30s %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", c.id, c.name, r.detail.c_str(), sec);
    std::fflush(stdout);
    failed += r.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
