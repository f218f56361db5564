#pragma once

// End-to-end experiments: Schauder ratios over a parameter sweep, Hölder decay exponents,
// operator regularity ratios, Liouville residuals of polynomial solutions and the
// diagnostics of the frozen-coefficient split.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kinetic/holder.hpp"
#include "kinetic/nonlocal.hpp"
#include "kinetic/spectral.hpp"

namespace kinetic {

/// Exponents of one sweep configuration.
struct Exponents {
  double s;
  double gamma;        // 0 < gamma < min(1, 2s)
  double alpha;        // 2 s gamma / (1 + 2s) unless overridden
  double alpha_prime;  // floor(2s + alpha) < 2s + alpha' < 2s + alpha

  static Exponents lawful(double s, double gamma);
  void validate() const;
};

struct HarnessConfig {
  std::vector<double> s_values{0.25, 0.5, 0.75};
  double gamma_factor = 0.8;  // gamma = gamma_factor * min(1, 2s)
  std::vector<std::string> kernels{"stable", "stable_half", "stable_double", "truncated", "oscillatory_ring"};
  std::vector<int> ladder{5, 9, 17};  // nodes per axis
  std::optional<double> alpha_override;  // breaks the exponent law on purpose
  double stability_threshold = 0.2;      // relative change between the two finest grids
  std::size_t max_bases = 48;            // base points per seminorm estimate
  unsigned seed = 1;

  void validate() const;
  Exponents exponents(double s) const;

  std::string to_json() const;
  static HarnessConfig from_json(const std::string& text);
};

/// Sweep kernel by name, in d = 1.
Kernel sweep_kernel(const std::string& name, const ScalingExponent& s);

/// Solution used by the sweep: f0 = cos(x + v) + cos(2v + 0.3)/2 at t = -2, c = cos(v + t)/2.
KineticSolution sweep_solution(const Kernel& K);

struct LevelRecord {
  int nodes = 0;
  double numerator = 0.0;    // [f]_{C^{2s+alpha}(Q_{1/2})}
  double slab_norm = 0.0;    // ||f||_{C^gamma} on the slab
  double source_norm = 0.0;  // ||c||_{C^alpha(Q_1)}
  double ratio = 0.0;
};

struct SweepRecord {
  std::string kernel;
  Exponents exponents{};
  std::vector<LevelRecord> levels;
  double relative_change = 0.0;  // between the two finest levels
  bool finite = false;
  bool stable = false;
  std::string error;  // estimator failure, if any
};

struct SweepReport {
  std::vector<SweepRecord> records;
  double seconds = 0.0;

  bool all_stable() const;
  /// kernel,s,gamma,alpha,nodes,numerator,slab_norm,source_norm,ratio,relative_change,stable
  void write_csv(std::ostream& os) const;
};

SweepReport run_schauder_sweep(const HarnessConfig& cfg);

/// Schauder ratio numerator for f = a t + b with c = a.
double polynomial_control(double s, double gamma, int nodes);

/// Samples of f on Q_r(z0) (a tensor grid of the kinetic box, times <= t0).
SampledField cylinder_samples(const PhaseFunction& f, const Point& z0, double r, int nodes, const ScalingExponent& s);

struct DecayEstimate {
  double exponent = 0.0;
  std::vector<double> radii;
  std::vector<double> oscillations;  // (max - min)/2 over Q_r(z0)
  bool degenerate = false;           // oscillation below the noise floor
};

/// Log-log slope of the oscillation of f over Q_r(z0) against r.
DecayEstimate measure_holder_decay(const SampledField& f, const Point& z0, const std::vector<double>& radii,
                                   const ScalingExponent& s);

struct RegularityRatio {
  double operator_seminorm = 0.0;  // [L_K f]_{C^alpha}
  double field_seminorm = 0.0;     // [f]_{C^{2s+alpha}}
  double ratio = 0.0;
};

/// [L_K f]_{C^alpha} / [f]_{C^{2s+alpha}} on the nodes of a grid, L_K by apply_at.
RegularityRatio operator_regularity_ratio(const Kernel& K, const PhaseFunction& f, const std::vector<Axis>& axes,
                                          double alpha, const Majorant& omega, const OperatorOptions& options = {},
                                          std::size_t max_bases = 48);

/// int w^beta K(w) dw over the support, beta an even multi-index with |beta| >= 2.
/// Throws DivergenceError when the moment is infinite.
double kernel_moment(const Kernel& K, const std::array<int, kMaxDim>& beta);

/// L applied to a polynomial: sum over even beta of the moments times D_v^beta p / beta!.
KineticPolynomial apply_to_polynomial(const Kernel& K, const KineticPolynomial& p);

/// max over the grid of |g_t + v.grad_x g - L g| with g(z) = p(xi o z) - p(z).
double liouville_residual(const KineticPolynomial& p, const Kernel& K, const Point& xi, const std::vector<Axis>& axes);

struct LiouvilleCase {
  std::string name;
  KineticPolynomial p;
  Kernel K;
  Point xi;
};

/// Admissible polynomial solutions in d = 1 for the given s.
std::vector<LiouvilleCase> liouville_cases(const ScalingExponent& s);

struct GrowthProbe {
  std::vector<double> spacings;
  std::vector<double> estimates;
  std::vector<double> growth;  // consecutive ratios
};

/// f = |t - t*| solves f_t = c with c = sign(t - t*) bounded but not Hölder. The C^{2s+alpha}
/// estimate at the time witness grows under refinement; the ladder ratio q is chosen so that
/// q^{alpha/2s} > 2.
GrowthProbe rough_time_probe(double s, double alpha, int levels = 3);

struct ExponentLawProbe {
  SweepReport lawful;
  SweepReport violated;  // alpha replaced by gamma
  std::vector<double> lawful_growth;
  std::vector<double> violated_growth;  // finest over coarsest ratio per configuration
  bool any_violation_grows = false;
};

ExponentLawProbe exponent_law_probe(const HarnessConfig& cfg);

struct SplitLemmaLevel {
  int nodes = 0;
  double A_constant = 0.0;  // sup |A(z1)-A(z2)| / (A0 (||f||_{2s+alpha} + ||f||_gamma) d^alpha)
  double B_constant = 0.0;  // sup |B(z1)-B(z2)| / (||f||_gamma d^alpha)
  double max_residual = 0.0;
};

/// Constants of the A/B estimates on the manufactured solution of the modulated family
/// a(z) = 1 + sin(t)/4 with the stable kernel in d = 1, over pairs of grid nodes in Q_{1/2}
/// separated by one step, a quarter and half of the box along each axis.
std::vector<SplitLemmaLevel> split_lemma_constants(double s, const std::vector<int>& ladder,
                                                   const OperatorOptions& options = {});

}  // namespace kinetic
