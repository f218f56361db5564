#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "kinetic/spectral.hpp"

using namespace kinetic;

namespace {

const ScalingExponent kHalf(0.5);
constexpr double kPi = std::numbers::pi;

// m index of velocity frequency xi on the default lattice
int lattice(double xi) { return static_cast<int>(std::lround(xi * kDefaultVelocityPeriod / (2.0 * kPi))); }

double at(const SpectralField& f, double x, double v) {
  const double xs[1] = {x}, vs[1] = {v};
  return f(xs, vs);
}

PhaseGrid small_grid(int d, int n = 7) {
  PhaseGrid g;
  g.d = d;
  for (int i = 0; i < d; ++i) {
    g.x.push_back({-2.0, 2.0, n});
    g.v.push_back({-2.0, 2.0, n});
  }
  return g;
}

std::vector<SpectralField> stencil(const SpectralField& f0, const Kernel& K, const SourceSpec& c, double t, double h) {
  std::vector<SpectralField> out;
  for (int j = -2; j <= 2; ++j) out.push_back(solve(f0, K, c, t + j * h));
  return out;
}

}  // namespace

TEST_CASE("identity at time zero and field plumbing") {
  const auto f0 = SpectralField::random(1, 2, 3, 11);
  CHECK(f0.is_hermitian());
  const Kernel K = Kernel::stable_like(1, kHalf);
  const auto f = solve(f0, K, SourceSpec::none(1), 0.0);
  CHECK(f.modes() == f0.modes());

  std::stringstream ss;
  f0.write_csv(ss);
  const auto back = SpectralField::read_csv(ss);
  CHECK(back.modes().size() == f0.modes().size());
  for (const auto& [k, a] : f0.modes()) CHECK(std::abs(back.amplitude(k) - a) < 1e-15);
  CHECK_THROWS_AS(solve(f0, K, SourceSpec::none(1), -1.0), std::invalid_argument);
}

TEST_CASE("single modes against characteristic closed forms") {
  const Kernel K = Kernel::stable_like(1, kHalf);
  SUBCASE("cos v decays at rate pi") {
    const auto f0 = SpectralField::cosine(1, {0}, {lattice(1.0)});
    for (double t : {0.25, 1.0, 3.0}) {
      const auto f = solve(f0, K, SourceSpec::none(1), t);
      for (double v : {-1.0, 0.0, 0.7}) CHECK(std::abs(at(f, 0.3, v) - std::exp(-kPi * t) * std::cos(v)) < 1e-12);
    }
  }
  SUBCASE("cos(x + v) at t = 1") {
    const auto f0 = SpectralField::cosine(1, {1}, {lattice(1.0)});
    const auto f = solve(f0, K, SourceSpec::none(1), 1.0);
    for (double x : {0.0, 1.2}) {
      for (double v : {-0.5, 2.0}) CHECK(std::abs(at(f, x, v) - std::exp(-kPi / 2) * std::cos(x)) < 1e-12);
    }
  }
  SUBCASE("quadrature path agrees with the closed form") {
    SolverOptions q;
    q.closed_form = false;
    const auto f0 = SpectralField::cosine(1, {2}, {lattice(0.75)});
    const auto a = solve(f0, K, SourceSpec::none(1), 0.5);
    const auto b = solve(f0, K, SourceSpec::none(1), 0.5, q);
    for (const auto& [k, amp] : a.modes()) CHECK(std::abs(b.amplitude(k) - amp) < 1e-8);
  }
  SUBCASE("other kernels use the quadrature symbol") {
    const Kernel T = Kernel::truncated_stable(1, ScalingExponent(0.25), 1.0);
    const auto f0 = SpectralField::cosine(1, {0}, {lattice(2.0)});
    const auto f = solve(f0, T, SourceSpec::none(1), 0.5);
    CHECK(std::abs(at(f, 0.0, 0.0) - std::exp(-0.5 * symbol(T, 2.0))) < 1e-12);
  }
  SUBCASE("off-lattice times") {
    const auto f0 = SpectralField::cosine(1, {1}, {lattice(1.0)});
    CHECK_THROWS_AS(solve(f0, K, SourceSpec::none(1), 1e-3 * std::numbers::sqrt2), std::domain_error);
    SolverOptions o;
    o.interpolate_off_lattice = true;
    const double t = 0.5 + 1e-4 * std::numbers::sqrt2;
    const auto f = solve(f0, K, SourceSpec::none(1), t, o);
    o.interpolation_radius = 1024;
    const auto g = solve(f0, K, SourceSpec::none(1), t, o);
    // truncated Dirichlet projection on the centred cell, |v| << v_period
    KineticSolution exact(f0, K, SourceSpec::none(1));
    for (double v : {-1.0, 0.5}) {
      const Point z(t, 0.2, v);
      const double e1 = std::abs(at(f, 0.2, v) - exact(z)), e2 = std::abs(at(g, 0.2, v) - exact(z));
      CHECK(e1 < 1e-4);
      CHECK(e2 < 1e-4);
    }
  }
}

TEST_CASE("sources") {
  const Kernel K = Kernel::stable_like(1, kHalf);
  SUBCASE("at + b with c = a") {
    SpectralField f0 = SpectralField::cosine(1, {0}, {0}, 2.0);  // b = 2
    SourceSpec c = SourceSpec::none(1);
    c.add_cosine({0}, 0.7);
    const double h = default_time_step(f0);
    const auto samples = stencil(f0, K, c, 1.0, h);
    CHECK(at(samples[2], 0.0, 0.0) == doctest::Approx(2.0 + 0.7 * 1.0).epsilon(1e-13));
    CHECK(residual_check(samples, K, c, small_grid(1)) < 1e-10);
  }
  SUBCASE("time-periodic forcing") {
    const auto f0 = SpectralField::cosine(1, {0}, {lattice(1.0)});
    SourceSpec c = SourceSpec::none(1);
    c.add_cosine({lattice(1.0)}, 1.0, 2.0);
    const double t = 0.75;
    const auto f = solve(f0, K, c, t);
    // direct: e^{-pi t} + int_0^t e^{-pi (t - s)} cos(2 s) ds, at v = 0
    const double p = kPi;
    const double duh = (p * std::cos(2 * t) + 2 * std::sin(2 * t) - p * std::exp(-p * t)) / (p * p + 4);
    CHECK(at(f, 0.0, 0.0) == doctest::Approx(std::exp(-p * t) + duh).epsilon(1e-12));
    CHECK(residual_check(stencil(f0, K, c, t, default_time_step(f0)), K, c, small_grid(1)) < 1e-6);
    SourceSpec bad = SourceSpec::none(1);
    bad.modes.push_back({ModeKey{{1}, {0}}, 1.0, 0.0});
    CHECK_THROWS_AS(solve(f0, K, bad, t), std::invalid_argument);
  }
}

TEST_CASE("semigroup, decay and covariance") {
  const Kernel K = Kernel::stable_like(1, ScalingExponent(0.3), 1.5);
  const auto f0 = SpectralField::random(1, 2, 4, 5);
  SourceSpec c = SourceSpec::none(1);
  c.add_cosine({3}, 0.4, 1.0);
  const double h = default_time_step(f0);
  const double t1 = 17 * h, t2 = 40 * h;
  SolverOptions o;
  o.quad_tol = 1e-12;
  const auto once = solve(f0, K, c, t1 + t2, o);
  const auto twice = solve(solve(f0, K, c, t1, o), K, c, t2, o);
  for (const auto& [k, a] : once.modes()) CHECK(std::abs(twice.amplitude(k) - a) < 2 * o.quad_tol * std::max(1.0, std::abs(a)));

  // |f_hat| nonincreasing along characteristics without sources
  double prev = f0.energy();
  for (int j = 1; j <= 8; ++j) {
    const auto f = solve(f0, K, SourceSpec::none(1), j * 8 * h);
    CHECK(f.energy() <= prev + 1e-14);
    prev = f.energy();
  }

  // left translation by (0, x0, v0) commutes with the evolution
  const Point z0(0.0, 0.4, -0.3);
  const auto a = translate(solve(f0, K, SourceSpec::none(1), t2), z0);
  const auto b = solve(translate(f0, z0), K, SourceSpec::none(1), t2);
  for (const auto& [k, amp] : a.modes()) CHECK(std::abs(b.amplitude(k) - amp) < 1e-12);
  CHECK_THROWS_AS(translate(f0, Point(1.0, 0.0, 0.0)), std::invalid_argument);
}

TEST_CASE("maximum principle on small nonnegative data") {
  const Kernel K = Kernel::stable_like(1, kHalf);
  // 1 + cos(x + v): nonnegative
  SpectralField f0 = SpectralField::cosine(1, {1}, {lattice(1.0)});
  f0.add(ModeKey{}, 1.0);
  const auto grid = small_grid(1, 21);
  for (double t : {0.25, 1.0}) {
    const auto s = sample_to_grid(solve(f0, K, SourceSpec::none(1), t), grid);
    for (double v : s.values) CHECK(v >= -1e-12);
  }
}

TEST_CASE("residuals of solver output") {
  const Kernel K = Kernel::stable_like(1, kHalf);
  const auto f0 = SpectralField::cosine(1, {1}, {lattice(1.0)});
  const double h = default_time_step(f0);
  const double r = residual_check(stencil(f0, K, SourceSpec::none(1), 0.5, h), K, SourceSpec::none(1), small_grid(1));
  CHECK(r < 1e-4);
  // at t = 1 the mode crosses xi = 0, where psi has a cusp and f_tt jumps
  const double kink = residual_check(stencil(f0, K, SourceSpec::none(1), 1.0, h), K, SourceSpec::none(1), small_grid(1));
  CHECK(kink > r);

  // the same samples with a wrong kernel are not a solution
  const Kernel wrong = Kernel::stable_like(1, kHalf, 2.0);
  const double rw = residual_check(stencil(f0, K, SourceSpec::none(1), 0.5, h), wrong, SourceSpec::none(1), small_grid(1));
  CHECK(rw > 10 * r);

  // random fields frozen in time are not solutions
  std::vector<SpectralField> frozen;
  for (int j = 0; j < 5; ++j) {
    auto f = SpectralField::random(1, 2, 3, 3);
    f.set_time(j * h);
    frozen.push_back(f);
  }
  CHECK(residual_check(frozen, K, SourceSpec::none(1), small_grid(1)) > 10 * r);

  std::vector<SpectralField> short_seq(frozen.begin(), frozen.begin() + 4);
  CHECK_THROWS_AS(residual_check(short_seq, K, SourceSpec::none(1), small_grid(1)), std::invalid_argument);
  CHECK_THROWS_AS(residual_check(frozen, K, SourceSpec::none(1), small_grid(2)), std::invalid_argument);

  // two dimensions with an anisotropic kernel
  const Kernel K2 = Kernel::stable_like(2, ScalingExponent(0.75), 1.0,
                                        [](std::span<const double> e) { return 1.0 + e[0] * e[0]; });
  const auto g0 = SpectralField::cosine(2, {1, 0}, {lattice(0.5), lattice(-1.0)});
  const double r2 = residual_check(stencil(g0, K2, SourceSpec::none(2), 0.5, h), K2, SourceSpec::none(2), small_grid(2, 5));
  CHECK(r2 < 1e-4);
}

TEST_CASE("pointwise solution") {
  const Kernel K = Kernel::stable_like(1, kHalf);
  SpectralField f0 = SpectralField::cosine(1, {1}, {lattice(1.0)});
  f0.set_time(-2.0);
  KineticSolution sol(f0, K, SourceSpec::none(1));
  // cos(x + (1 - tau) v) e^{-pi int_0^tau |1 - u| du}
  for (double tau : {0.3, 1.0, 1.7}) {
    const double decay = tau <= 1 ? tau - tau * tau / 2 : 0.5 + (tau - 1) * (tau - 1) / 2;
    const Point z(-2.0 + tau, 0.4, -0.6);
    CHECK(sol(z) == doctest::Approx(std::cos(0.4 + (1 - tau) * -0.6) * std::exp(-kPi * decay)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sol(Point(-3.0, 0.0, 0.0)), std::invalid_argument);
  const double t = -2.0 + 64 * default_time_step(f0);
  const auto snap = sol.at(t);
  CHECK(at(snap, 0.1, 0.2) == doctest::Approx(sol(Point(t, 0.1, 0.2))).epsilon(1e-12));
}

TEST_CASE("sampling and Parseval") {
  // full period cell in x and v with a coarse v-lattice
  const double P = 2 * kPi * 4;
  const auto f = SpectralField::random(1, 2, 3, 9, P);
  PhaseGrid g;
  g.d = 1;
  const int n = 16;
  g.x.push_back({0.0, 2 * kPi * (n - 1) / n, n});
  g.v.push_back({0.0, P * (n - 1) / n, n});
  const auto s = sample_to_grid(f, g);
  double mean = 0.0;
  for (double v : s.values) mean += v * v;
  mean /= static_cast<double>(s.size());
  CHECK(mean == doctest::Approx(f.energy()).epsilon(1e-12));

  const auto zero = sample_to_grid(SpectralField(1), g);
  for (double v : zero.values) CHECK(v == 0.0);
  const auto c = sample_to_grid(SpectralField::cosine(1, {1}, {0}, 2.0), g);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c.values[i] == doctest::Approx(2 * std::cos(c.points[i].x[0])));
}
