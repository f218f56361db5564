#pragma once

// Pointwise evaluation of L f(v0) = int (f(v0+w) - f(v0)) K(w) dw, tail majorants, kinetic
// mollification and the frozen-coefficient split.

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kinetic/kernel.hpp"
#include "kinetic/polynomial.hpp"
#include "kinetic/sampled_field.hpp"

namespace kinetic {

/// f(v) for a fixed (t, x).
using VelocityFunction = std::function<double(std::span<const double>)>;
/// f(t, x, v).
using PhaseFunction = std::function<double(const Point&)>;

/// Radial envelope omega(r) on the annulus B_{2r}(v0) \ B_{r/2}(v0). What it bounds depends on
/// TailModel: the even part (f(v0+w) + f(v0-w))/2, or that even part minus f(v0).
class Majorant {
 public:
  /// Throws DivergenceError when int_1^inf omega(r) r^{-1-2s} dr is not finite.
  Majorant(std::function<double(double)> bound, const ScalingExponent& s, std::string description = {});

  static Majorant constant(double M, const ScalingExponent& s);
  /// C r^gamma (gamma < 2s).
  static Majorant power(double C, double gamma, const ScalingExponent& s);

  double operator()(double r) const { return bound_(r); }
  const std::string& description() const noexcept { return description_; }

 private:
  std::function<double(double)> bound_;
  std::string description_;
};

/// int_a^inf omega(r) r^{-1-2s} dr, by dyadic rings with a geometric remainder estimate.
double majorant_integral(const Majorant& omega, double a, const ScalingExponent& s);

/// Universal factor of the tail lemma: 2^{6-2s}/3.
double tail_constant(const ScalingExponent& s);

/// Lambda * tail_constant * int_{R/2}^inf omega(r) r^{-1-2s} dr: bounds |int_{|w|>R} f(v0+w) K|.
double tail_bound(const Majorant& omega, double R, double Lambda, const ScalingExponent& s);

/// Local regularity datum [f]_{C^{2s+eps}} near v0.
struct HolderDatum {
  double seminorm = 0.0;
  double epsilon = 0.1;
};

enum class TailModel {
  even_part,          // beyond far_radius: -f(v0) * mass is exact, the even part of f is bounded by omega
  second_difference,  // beyond far_radius: omega bounds |(f(v0+w) + f(v0-w))/2 - f(v0)|
};

struct OperatorOptions {
  double split_radius = 1.0;   // near/far split
  double far_radius = 4096.0;  // quadrature stops here; the rest is bounded by the majorant
  double frequency_hint = 1.0; // oscillation of f, sets the panel size
  bool symmetrize = true;      // false: plain near-field integrand (needs 2s < 1)
  int inner_octaves = 6;       // dyadic rings resolved below split_radius; the ball inside is
                               // fitted from the second difference at its edge
  TailModel tail_model = TailModel::even_part;
  std::vector<double> breakpoints;  // radii |w| where f(v0 + w) loses smoothness; panels are cut there
  bool trace = false;
};

struct RingTrace {
  int ring;           // w in [2^{ring-1}, 2^ring)
  double partial_sum;
  double error_bound; // accumulated quadrature error
};

struct PointwiseValue {
  double value = 0.0;
  double near = 0.0;
  double far = 0.0;
  double quadrature_error = 0.0;
  double origin_bound = 0.0;  // unresolved ball around 0: Hölder datum if given, else extrapolation drift
  double tail = 0.0;          // unresolved far field, from the majorant
  std::vector<RingTrace> trace;

  double error_bound() const noexcept { return quadrature_error + origin_bound + tail; }
};

PointwiseValue apply_pointwise(const Kernel& K, const VelocityFunction& f, std::span<const double> v0,
                               const HolderDatum& reg, const Majorant& omega, const OperatorOptions& options = {});

void write_trace_csv(std::ostream& os, const std::vector<RingTrace>& trace);

/// L f(z) acting on the v-variable of a phase-space function.
PointwiseValue apply_at(const Kernel& K, const PhaseFunction& f, const Point& z, const HolderDatum& reg,
                        const Majorant& omega, const OperatorOptions& options = {});

/// Smooth compactly supported weight on [-ht,ht] x [-hx,hx]^d x [-hv,hv]^d.
struct Mollifier {
  int d = 1;
  double ht = 0.0, hx = 0.0, hv = 0.0;
  PhaseFunction fn;
  int nodes = 8;  // Gauss nodes per axis

  /// Product of normalized C^infinity bumps (discrete integral 1 on the node grid).
  static Mollifier bump(int d, double ht, double hx, double hv, int nodes = 8);
};

/// (phi *_k f)(z) = int phi(xi) f(xi o z) dxi at the given points.
std::vector<double> kinetic_convolve(const Mollifier& phi, const PhaseFunction& f, const std::vector<Point>& points);

/// Same on the nodes of a grid whose shifted stencil stays inside the grid; f is interpolated.
/// Throws std::invalid_argument when no node has enough margin.
SampledField kinetic_convolve(const Mollifier& phi, const GridField& f);

/// phi *_k p as a kinetic polynomial (sum of left translates).
KineticPolynomial convolve_polynomial(const Mollifier& phi, const KineticPolynomial& p);

/// eta(v) = 1 on |v| <= inner, 0 on |v| >= outer, polynomial smoothstep of the given order between.
struct CutoffSpec {
  double inner = 0.75;
  double outer = 1.0;
  int order = 2;  // 2: quintic, C^2

  CutoffSpec() = default;
  CutoffSpec(double inner_, double outer_, int order_ = 2);
  double operator()(std::span<const double> v) const;
};

struct FreezeSplitValue {
  double L0_eta_f = 0.0;  // L_0(eta f)(z)
  double A = 0.0;         // int (f(v+w) - f(v)) (K_z - K_0)(w) dw
  double B = 0.0;         // int (eta(v+w) - eta(v)) f(v+w) K_0(w) dw
  double error_bound = 0.0;
};

/// Requires z in the plateau |v| <= eta.inner. omega majorizes f(t,x,.) about v.
FreezeSplitValue freeze_split(const KernelFamily& F, const PhaseFunction& f, const Majorant& omega,
                              const CutoffSpec& eta, const Point& z, const OperatorOptions& options = {});

struct SplitResidual {
  double transport = 0.0;  // (eta f)_t + v . grad_x (eta f), fourth-order differences
  double source = 0.0;
  FreezeSplitValue split;
  double residual = 0.0;   // transport - L0(eta f) - (c + A - B)
};

/// Checks (eta f)_t + v.grad_x(eta f) - L_0(eta f) = c + A - B at z, with c the source of the
/// variable-kernel equation solved by f.
SplitResidual freeze_split_residual(const KernelFamily& F, const PhaseFunction& f, const PhaseFunction& c,
                                    const Majorant& omega, const CutoffSpec& eta, const Point& z,
                                    double step = 1e-3, const OperatorOptions& options = {});

}  // namespace kinetic
