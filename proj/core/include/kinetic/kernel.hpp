#pragma once

// Symmetric jump kernels K(w) on R^d \ {0} and the diagnostics of the ellipticity class:
// upper bound and non-degeneracy constants, coercivity ratios, Fourier symbol, ring moments,
// weak-* gaps and the Hölder modulus of z-dependent families.
//
// Every kernel is stored in directional form
//   K(r theta) = a(theta) c(r) r^{-d-2s} (1 + depth sin(frequency r)),
// with a(.) sampled on the sphere rule of the dimension and c(.) piecewise constant in r.

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kinetic/group.hpp"
#include "kinetic/quadrature.hpp"

namespace kinetic {

enum class KernelForm { stable_like, truncated_stable, ring_measure, oscillatory };

std::string_view to_string(KernelForm form) noexcept;

class Kernel {
 public:
  /// amplitude * a(w/|w|) * |w|^{-d-2s}. angular: callable on unit vectors (default 1), symmetrized.
  static Kernel stable_like(int d, ScalingExponent s, double amplitude = 1.0,
                            const std::function<double(std::span<const double>)>& angular = {});
  /// Angular density given by its values on sphere_rule(d).
  static Kernel stable_like_sampled(int d, ScalingExponent s, double amplitude, std::vector<double> samples);
  /// amplitude * |w|^{-d-2s} on |w| < cutoff, zero outside.
  static Kernel truncated_stable(int d, ScalingExponent s, double cutoff, double amplitude = 1.0);
  /// Mass m_k on the ring C_k = {2^{k-1} <= |w| < 2^k}, spread with an isotropic |w|^{-d-2s} profile.
  static Kernel ring_measure(int d, ScalingExponent s, std::map<int, double> masses);
  /// amplitude * (1 + depth sin(frequency |w|)) |w|^{-d-2s}; 0 <= depth <= 1.
  static Kernel oscillatory(int d, ScalingExponent s, double frequency, double depth = 0.5, double amplitude = 1.0);
  static Kernel zero(int d, ScalingExponent s);

  /// r^{d+2s} K(r w).
  Kernel scaled(double r) const;
  /// factor * K, factor >= 0.
  Kernel multiplied(double factor) const;

  int d() const noexcept { return d_; }
  const ScalingExponent& s() const noexcept { return s_; }
  KernelForm form() const noexcept { return form_; }
  const SphereRule& sphere() const { return sphere_rule(d_); }

  /// Angular density at direction index i (amplitude included).
  double angular(std::size_t i) const { return angular_[i]; }
  /// Radial profile factor c(r).
  double profile(double r) const noexcept;
  double modulation(double r) const noexcept;
  /// K(r theta_i).
  double radial(std::size_t i, double r) const noexcept;
  double depth() const noexcept { return depth_; }
  double frequency() const noexcept { return frequency_; }

  /// Radii where c(.) jumps.
  std::vector<double> breakpoints() const;
  /// c(r) for r -> 0 and r -> inf (0 when the profile vanishes there).
  double near_coefficient() const noexcept;
  double far_coefficient() const noexcept;
  /// sup of |w| over the support (inf when unbounded).
  double support_radius() const noexcept;
  bool is_zero() const noexcept;

  /// {"form", "s", "d", "parameters"}.
  std::string to_json() const;
  static Kernel from_json(const std::string& text);

 private:
  struct Segment {
    double lo, hi, coeff;
  };
  Kernel(int d, ScalingExponent s, KernelForm form);

  int d_;
  ScalingExponent s_;
  KernelForm form_;
  std::vector<double> angular_;
  std::vector<Segment> segments_;
  double depth_ = 0.0;
  double frequency_ = 0.0;
  // Construction record for serialization.
  std::string params_;
  double scale_ = 1.0;
  double factor_ = 1.0;
};

struct EllipticityParams {
  double lambda;
  double Lambda;
  ScalingExponent s;

  EllipticityParams(double lambda_, double Lambda_, ScalingExponent s_);
};

/// sum_i w_i int_lo^hi F(i, r) K(r theta_i) r^{d-1} dr.
QuadResult integrate_directional(const Kernel& K, const std::function<double(std::size_t, double)>& F,
                                 double lo, double hi, double test_frequency = 0.0,
                                 std::span<const double> extra_breaks = {});

/// sup over radii of r^{2s-2} int_{B_r} |w|^2 K.
double upper_bound_constant(const Kernel& K, std::span<const double> radii);
/// r^{2s-2} int_{B_r} |w|^2 K at one radius.
double upper_bound_ratio(const Kernel& K, double r);

/// inf over radii and unit directions e of r^{2s-2} int_{B_r} (w.e)_+^2 K.
double nondegeneracy_constant(const Kernel& K, std::span<const double> radii,
                              const std::vector<std::vector<double>>& directions);

struct TestFunction {
  std::string name;
  std::function<double(std::span<const double>)> fn;
};

/// Fixed family of 20 smooth functions on R^d: coordinates, Gaussians and seeded random
/// trigonometric polynomials.
std::vector<TestFunction> coercivity_family(int d, unsigned seed = 7);

struct CoercivityOptions {
  int v_nodes = 64;     // Gauss nodes per radial direction of the outer v-integral
  int depth = 24;       // dyadic rings resolved below the exit radius
};

/// iint_{B_R x B_R} |phi(v)-phi(v')|^2 K(v'-v) over the same with |v'-v|^{-d-2s} on B_{R/2}.
double coercivity_ratio(const Kernel& K, const std::function<double(std::span<const double>)>& phi,
                        double R, const CoercivityOptions& options = {});

struct CoercivityTable {
  std::vector<std::pair<std::string, double>> ratios;
  double min_ratio = 0.0;
  std::string argmin;
};

CoercivityTable coercivity_table(const Kernel& K, double R, const std::vector<TestFunction>& family,
                                 const CoercivityOptions& options = {});

/// int (1 - cos(xi.w)) K(w) dw.
double symbol(const Kernel& K, std::span<const double> xi);
double symbol(const Kernel& K, double xi);  // d = 1

/// int_0^inf (1 - cos u) u^{-1-2s} du.
double stable_symbol_constant(const ScalingExponent& s);

struct RingMoment {
  int k;
  double mass;
  double second_moment;
};

/// Mass and second moment of K on C_k = {2^{k-1} <= |w| < 2^k} for k in [k_min, k_max].
std::vector<RingMoment> ring_moments(const Kernel& K, int k_min = -40, int k_max = 40);
void write_ring_moments_csv(std::ostream& os, const std::vector<RingMoment>& moments);

/// Upper-bound constant implied by ring data: max_k 2^{-k(2-2s)} sum_{j<=k} second_moment_j.
double ring_upper_bound(const std::vector<RingMoment>& moments, const ScalingExponent& s);

/// Continuous test function supported in the annulus inner <= |w| <= outer, inner > 0.
struct AnnularTest {
  std::string name;
  std::function<double(std::span<const double>)> fn;
  double inner;
  double outer;
};

/// Smooth bumps on a few annuli, plus direction-weighted variants in d >= 2.
std::vector<AnnularTest> weak_star_tests(int d);

/// int phi K.
double pair_with(const Kernel& K, const AnnularTest& phi);

/// max over tests of |int phi K1 - int phi K2|.
double weak_star_gap(const Kernel& K1, const Kernel& K2, const std::vector<AnnularTest>& tests);

/// Kernels K_z depending on z = (t,x,v), with a recorded modulus A0.
class KernelFamily {
 public:
  /// K_z = K0 for every z.
  static KernelFamily constant(Kernel K0);
  /// K_z = a(z) K0 with a > 0.
  static KernelFamily modulated(Kernel K0, std::function<double(const Point&)> a, std::string description = {});
  static KernelFamily custom(std::function<Kernel(const Point&)> generator, Kernel reference,
                             std::string description = {});

  Kernel at(const Point& z) const;
  /// K_{(0,0,0)}.
  const Kernel& reference() const noexcept { return reference_; }
  /// a(z) for modulated and constant families.
  std::optional<double> amplitude(const Point& z) const;

  double A0 = 0.0;
  std::string description;

 private:
  KernelFamily(Kernel reference) : reference_(std::move(reference)) {}
  Kernel reference_;
  std::function<Kernel(const Point&)> generator_;
  std::function<double(const Point&)> amplitude_;
};

struct HolderModulusReport {
  double A0 = 0.0;                 // sup r^{2s-2} d^{-alpha} int_{B_r} |K1-K2| |w|^2
  std::size_t witness_pair = 0;
  double witness_radius = 0.0;
  double near_constant = 0.0;      // sup int_{|w|<=1} |w|^{2s+alpha}|K1-K2| / (A0 d^alpha)
  double far_constant = 0.0;       // sup int_{|w|>=1} |K1-K2| / (A0 d^alpha)
};

/// int_{B_r} |K1 - K2| |w|^2.
double difference_moment(const Kernel& K1, const Kernel& K2, double r);
/// int_{|w| <= 1} |w|^{2s+alpha} |K1 - K2|.
double difference_near(const Kernel& K1, const Kernel& K2, double alpha);
/// int_{|w| >= 1} |K1 - K2|.
double difference_far(const Kernel& K1, const Kernel& K2);

HolderModulusReport holder_modulus(const KernelFamily& F, const std::vector<std::pair<Point, Point>>& pairs,
                                   std::span<const double> radii, double alpha, const ScalingExponent& s);

}  // namespace kinetic
