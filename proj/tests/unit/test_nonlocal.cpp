#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "kinetic/error.hpp"
#include "kinetic/nonlocal.hpp"

using namespace kinetic;

namespace {

const ScalingExponent kHalf(0.5), kQuarter(0.25), kThreeQuarter(0.75);

}  // namespace

TEST_CASE("majorant integrals and tail bounds") {
  for (double s : {0.25, 0.5, 0.75}) {
    const ScalingExponent se(s);
    const double R = 8.0, lam = 3.0;
    // constant: int_{R/2}^inf r^{-1-2s} = (R/2)^{-2s} / 2s
    const double c = tail_bound(Majorant::constant(2.0, se), R, lam, se);
    CHECK(c == doctest::Approx(lam * tail_constant(se) * 2.0 * std::pow(R / 2, -2 * s) / (2 * s)).epsilon(1e-10));
    const double g = s;  // gamma < 2s
    const double p = tail_bound(Majorant::power(1.0, g, se), R, lam, se);
    CHECK(p == doctest::Approx(lam * tail_constant(se) * std::pow(R / 2, g - 2 * s) / (2 * s - g)).epsilon(1e-8));
    CHECK_THROWS_AS(Majorant::power(1.0, 2 * s, se), DivergenceError);
  }
  CHECK(tail_constant(kHalf) == doctest::Approx(32.0 / 3.0));
  CHECK(majorant_integral(Majorant::constant(0.0, kHalf), 1.0, kHalf) == 0.0);
  // slowly decaying but integrable
  const double gs = 0.99;
  CHECK(majorant_integral(Majorant::power(1.0, gs, kHalf), 1.0, kHalf) ==
        doctest::Approx(1.0 / (1.0 - gs)).epsilon(1e-6));
  CHECK_THROWS_AS(tail_bound(Majorant::constant(1.0, kHalf), 0.0, 1.0, kHalf), std::invalid_argument);
}

TEST_CASE("second moment of the truncated kernel") {
  for (double s : {0.25, 0.5, 0.75}) {
    const ScalingExponent se(s);
    const Kernel K = Kernel::truncated_stable(1, se, 1.0);
    auto sq = [](std::span<const double> v) { return v[0] * v[0]; };
    for (double v0 : {0.0, 0.7, -3.0}) {
      const double x[1] = {v0};
      const auto r = apply_pointwise(K, sq, x, {}, Majorant::constant(0.0, se));
      CHECK(r.value == doctest::Approx(1.0 / (1.0 - s)).epsilon(1e-6));
      CHECK(r.tail == 0.0);
    }
  }
  // d = 2: int_{B_1} |w|^2 |w|^{-2-2s} ... with f = |v|^2 the second difference is |w|^2.
  const Kernel K2 = Kernel::truncated_stable(2, kHalf, 1.0);
  auto sq2 = [](std::span<const double> v) { return v[0] * v[0] + v[1] * v[1]; };
  const double x2[2] = {0.2, -0.1};
  const auto r2 = apply_pointwise(K2, sq2, x2, {}, Majorant::constant(0.0, kHalf));
  CHECK(r2.value == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-6));
}

TEST_CASE("cosine eigenfunction of the stable operator") {
  const Kernel K = Kernel::stable_like(1, kHalf);
  auto c = [](std::span<const double> v) { return std::cos(v[0]); };
  for (double v0 : {0.0, 0.3, 2.0, -1.1}) {
    const double x[1] = {v0};
    const auto r = apply_pointwise(K, c, x, {}, Majorant::constant(1.0, kHalf));
    const double exact = -std::numbers::pi * std::cos(v0);
    CHECK(std::abs(r.value - exact) < 1e-4);
    CHECK(std::abs(r.value - exact) <= r.error_bound());
  }
  // other s, against the closed-form symbol
  for (double s : {0.25, 0.75}) {
    const ScalingExponent se(s);
    const Kernel Ks = Kernel::stable_like(1, se);
    const double psi = 2.0 * stable_symbol_constant(se);
    for (double xi : {0.5, 2.0}) {
      auto f = [xi](std::span<const double> v) { return std::cos(xi * v[0]) + std::sin(xi * v[0]); };
      const double x[1] = {0.4};
      OperatorOptions o;
      o.frequency_hint = xi;
      const auto r = apply_pointwise(Ks, f, x, {}, Majorant::constant(2.0, se), o);
      const double exact = -psi * std::pow(xi, 2 * s) * f(x);
      CHECK(std::abs(r.value - exact) <= r.error_bound());
      CHECK(std::abs(r.value - exact) < 1e-3 * std::abs(exact) + 1e-4);
    }
  }
}

TEST_CASE("plane waves in two dimensions") {
  const Kernel K = Kernel::stable_like(2, kThreeQuarter, 1.0, [](std::span<const double> e) {
    return 1.0 + 0.5 * e[0] * e[0];
  });
  const double xi[2] = {0.8, -0.5};
  auto f = [&](std::span<const double> v) { return std::cos(xi[0] * v[0] + xi[1] * v[1]); };
  const double x[2] = {0.3, 0.9};
  const auto r = apply_pointwise(K, f, x, {}, Majorant::constant(1.0, kThreeQuarter));
  const double exact = -symbol(K, xi) * f(x);
  CHECK(std::abs(r.value - exact) <= r.error_bound());
  CHECK(std::abs(r.value - exact) < 1e-4);
}

TEST_CASE("affine inputs vanish") {
  for (double s : {0.25, 0.5, 0.75}) {
    const ScalingExponent se(s);
    OperatorOptions o;
    o.tail_model = TailModel::second_difference;
    const Kernel K1 = Kernel::stable_like(1, se);
    auto a1 = [](std::span<const double> v) { return 3.0 - 2.0 * v[0]; };
    const double x1[1] = {0.4};
    CHECK(std::abs(apply_pointwise(K1, a1, x1, {}, Majorant::constant(0.0, se), o).value) < 1e-11);
    const Kernel K2 = Kernel::oscillatory(2, se, 4.0);
    auto a2 = [](std::span<const double> v) { return 1.0 + v[0] - 0.5 * v[1]; };
    const double x2[2] = {0.1, -0.7};
    const auto r = apply_pointwise(K2, a2, x2, {}, Majorant::constant(0.0, se), o);
    // zero up to roundoff in f(v0 + w) - f(v0) over |w| <= 4096
    CHECK(std::abs(r.value) < 1e-11);
    CHECK(r.tail == 0.0);
  }
}

TEST_CASE("principal value agrees with the symmetrized form for small s") {
  const Kernel K = Kernel::stable_like(1, kQuarter, 1.0);
  auto f = [](std::span<const double> v) { return std::sin(v[0]) + 0.3 * std::cos(2.0 * v[0]); };
  const double x[1] = {0.6};
  OperatorOptions sym, plain;
  plain.symmetrize = false;
  sym.frequency_hint = plain.frequency_hint = 2.0;
  const Majorant om = Majorant::constant(1.3, kQuarter);
  const auto a = apply_pointwise(K, f, x, {}, om, sym);
  const auto b = apply_pointwise(K, f, x, {}, om, plain);
  CHECK(std::abs(a.value - b.value) < 1e-8);
}

TEST_CASE("error bounds and traces") {
  const Kernel K = Kernel::stable_like(1, kHalf);
  auto c = [](std::span<const double> v) { return std::cos(3.0 * v[0]); };
  const double x[1] = {0.2};
  OperatorOptions o;
  o.trace = true;
  o.far_radius = 64.0;
  o.frequency_hint = 3.0;
  const auto r = apply_pointwise(K, c, x, {}, Majorant::constant(1.0, kHalf), o);
  const double exact = -3.0 * std::numbers::pi * std::cos(0.6);
  CHECK(std::abs(r.value - exact) <= r.error_bound());
  CHECK(r.tail > 0.0);
  REQUIRE(!r.trace.empty());
  CHECK(r.trace.back().ring == 6);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].ring >= r.trace[i - 1].ring);
    CHECK(r.trace[i].error_bound >= r.trace[i - 1].error_bound);
  }
  std::ostringstream os;
  write_trace_csv(os, r.trace);
  CHECK(os.str().rfind("ring,partial_sum,bound\n", 0) == 0);

  // Hölder datum: the ball bound scales like r0^eps
  auto rough = [](std::span<const double> v) { return std::pow(std::abs(v[0]), 1.5); };
  const double z[1] = {0.0};
  const auto h = apply_pointwise(Kernel::stable_like(1, kHalf), rough, z, HolderDatum{1.0, 0.5},
                                 Majorant::power(1.0, 0.5, kHalf));
  CHECK(h.origin_bound > 0.0);
  // int (|w|^{3/2}) |w|^{-2} dw diverges at infinity, so only the majorant tail is finite here
  CHECK(std::isfinite(h.value));

  const double bad[2] = {0.0, 0.0};
  CHECK_THROWS_AS(apply_pointwise(K, c, bad, {}, Majorant::constant(1.0, kHalf)), std::invalid_argument);
}

TEST_CASE("phase-space evaluation") {
  const Kernel K = Kernel::stable_like(1, kHalf);
  auto f = [](const Point& z) { return std::cos(z.x[0] + z.v[0]) * std::exp(-z.t); };
  Point z = Point::zero(1);
  z.t = 0.5;
  z.x[0] = 0.2;
  z.v[0] = -0.4;
  const auto r = apply_at(K, f, z, {}, Majorant::constant(1.0, kHalf));
  CHECK(r.value == doctest::Approx(-std::numbers::pi * f(z)).epsilon(1e-4));
}

TEST_CASE("kinetic mollification") {
  SUBCASE("approximate identity") {
    const Mollifier phi = Mollifier::bump(1, 0.02, 0.02, 0.02);
    auto f = [](const Point& z) { return std::sin(z.t + 2.0 * z.x[0] - z.v[0]); };
    std::vector<Point> pts;
    for (double t : {-0.5, 0.0, 0.3}) {
      Point z = Point::zero(1);
      z.t = t;
      z.x[0] = 0.4 - t;
      z.v[0] = 0.1 + t;
      pts.push_back(z);
    }
    const auto out = kinetic_convolve(phi, f, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      // modulus of continuity over the support: |grad f| times the shift size
      CHECK(std::abs(out[i] - f(pts[i])) < 4.0 * 0.02 * (1.0 + std::abs(pts[i].t)));
    }
  }
  SUBCASE("normalization and zero-mean weights") {
    const Mollifier phi = Mollifier::bump(1, 0.1, 0.2, 0.3);
    Point z = Point::zero(1);
    CHECK(kinetic_convolve(phi, [](const Point&) { return 1.0; }, {z})[0] == doctest::Approx(1.0).epsilon(1e-12));
    Mollifier odd = phi;
    odd.fn = [base = phi.fn](const Point& p) { return p.v[0] * base(p); };
    CHECK(std::abs(kinetic_convolve(odd, [](const Point&) { return 5.0; }, {z})[0]) < 1e-14);
  }
  SUBCASE("polynomials stay polynomials of the same degree") {
    const ScalingExponent s(0.5);
    KineticPolynomial p(s, 1);
    p.add_term(MultiIndex::t_power(1, 1), 1.0);
    p.add_term(MultiIndex::v_power(0, 2, 1), 2.0);
    p.add_term(MultiIndex(0, {1}, {1}, 1), -1.0);  // -x v
    const Mollifier phi = Mollifier::bump(1, 0.1, 0.1, 0.1, 6);
    const auto q = convolve_polynomial(phi, p);
    CHECK(q.degree() == doctest::Approx(p.degree()));
    // pointwise comparison with direct quadrature
    Point z = Point::zero(1);
    z.t = 0.3;
    z.x[0] = -0.2;
    z.v[0] = 0.5;
    const double direct = kinetic_convolve(phi, [&](const Point& w) { return p.eval(w); }, {z})[0];
    CHECK(q.eval(z) == doctest::Approx(direct).epsilon(1e-12));
  }
  SUBCASE("sampled fields and margins") {
    GridField g(1, {{-0.5, 0.5, 9}, {-1.0, 1.0, 17}, {-1.0, 1.0, 17}});
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point z = g.point(i);
      g[i] = z.t + z.x[0] - z.v[0];
    }
    const auto out = kinetic_convolve(Mollifier::bump(1, 0.1, 0.1, 0.1), g);
    CHECK(out.size() > 0);
    CHECK(out.size() < g.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Point& z = out.points[i];
      // affine in (t, x, v) is reproduced up to interpolation error
      CHECK(out.values[i] == doctest::Approx(z.t + z.x[0] - z.v[0]).epsilon(1e-8));
    }
    CHECK_THROWS_AS(kinetic_convolve(Mollifier::bump(1, 2.0, 0.1, 0.1), g), std::invalid_argument);
  }
}

TEST_CASE("cutoff") {
  const CutoffSpec eta(0.5, 1.0);
  const double a[1] = {0.3}, b[1] = {0.75}, c[1] = {1.2};
  CHECK(eta(a) == 1.0);
  CHECK(eta(b) == doctest::Approx(0.5));
  CHECK(eta(c) == 0.0);
  // C^2 at the outer seam: eta ~ 10 u^3
  const double e[1] = {1.0 - 1e-3};
  CHECK(eta(e) == doctest::Approx(10.0 * std::pow(2e-3, 3)).epsilon(1e-2));
  CHECK_THROWS_AS(CutoffSpec(1.0, 0.5), std::invalid_argument);
}

TEST_CASE("frozen-coefficient split") {
  const ScalingExponent s(0.5);
  const Kernel K0 = Kernel::stable_like(1, s);
  const CutoffSpec eta(0.75, 1.0);
  Point z = Point::zero(1);
  z.t = 0.1;
  z.x[0] = 0.3;
  z.v[0] = 0.2;

  SUBCASE("constant family has A = 0") {
    auto f = [](const Point& p) { return std::cos(p.x[0] + p.v[0]); };
    const auto r = freeze_split(KernelFamily::constant(K0), f, Majorant::constant(1.0, s), eta, z);
    CHECK(r.A == 0.0);
  }
  SUBCASE("B vanishes for f supported inside the plateau") {
    auto f = [](const Point& p) {
      const double v = p.v[0];
      return std::abs(v) < 0.5 ? std::pow(0.25 - v * v, 3) : 0.0;
    };
    OperatorOptions o;
    o.tail_model = TailModel::second_difference;
    const auto r = freeze_split(KernelFamily::constant(K0), f, Majorant::constant(1.0, s), eta, z, o);
    CHECK(r.B == 0.0);
    // L0(eta f) = L0 f here
    const auto direct = apply_at(K0, f, z, {}, Majorant::constant(0.1, s));
    CHECK(r.L0_eta_f == doctest::Approx(direct.value).epsilon(1e-6));
  }
  SUBCASE("identity on a manufactured solution") {
    // f = e^{-pi a t} cos(v) with K_z = a(z) K0, a depending on t only: f_t = L_z f.
    auto a = [](const Point& p) { return 1.0 + 0.25 * std::sin(p.t); };
    auto fam = KernelFamily::modulated(K0, a, "1 + sin(t)/4");
    // a(0) = 1, so L_z f = -pi a(z) f; with f = exp(-pi int_0^t a) cos v
    auto f = [](const Point& p) {
      return std::exp(-std::numbers::pi * (p.t + 0.25 * (1.0 - std::cos(p.t)))) * std::cos(p.v[0]);
    };
    auto c = [](const Point&) { return 0.0; };
    OperatorOptions o;
    o.far_radius = 65536.0;
    const auto r = freeze_split_residual(fam, f, c, Majorant::constant(1.0, s), eta, z, 1e-3, o);
    CHECK(std::abs(r.residual) < 1e-5);
    // the seams of eta sit at w = 0.25 and 0.5 on one side; panels must be cut there
    const auto r2 = freeze_split_residual(fam, f, c, Majorant::constant(1.0, s), eta, Point(-0.4, -0.2, -0.5), 1e-3, o);
    CHECK(std::abs(r2.residual) < 1e-7);
    CHECK(r.split.A != 0.0);
    CHECK(r.split.B != 0.0);
  }
  SUBCASE("outside the plateau") {
    Point w = z;
    w.v[0] = 0.9;
    CHECK_THROWS_AS(freeze_split(KernelFamily::constant(K0), [](const Point&) { return 0.0; },
                                 Majorant::constant(1.0, s), eta, w),
                    std::invalid_argument);
  }
}
