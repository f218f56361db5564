#pragma once

// Fourier solver for f_t + v . grad_x f = L f + c with a constant kernel, periodic in x and v.
//
// A field is a finite sum of modes a e^{i(k.x + xi.v)}, k in Z^d (x-period 2 pi) and
// xi = m * 2 pi / v_period with m in Z^d. Transport moves the mode (k, xi) to (k, xi - t k) and
// the operator damps it by exp(-int psi along that path).

#include <array>
#include <complex>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "kinetic/kernel.hpp"
#include "kinetic/sampled_field.hpp"

namespace kinetic {

using Complex = std::complex<double>;

struct ModeKey {
  std::array<int, kMaxDim> k{};
  std::array<int, kMaxDim> m{};

  auto operator<=>(const ModeKey&) const = default;
  ModeKey conjugate() const noexcept;
};

inline constexpr double kDefaultVelocityPeriod = 2.0 * 3.14159265358979323846 * 256.0;

class SpectralField {
 public:
  explicit SpectralField(int d = 1, double time = 0.0, double v_period = kDefaultVelocityPeriod);

  /// a cos(k.x + xi_m.v + phase), stored as two conjugate modes.
  static SpectralField cosine(int d, std::array<int, kMaxDim> k, std::array<int, kMaxDim> m, double amplitude = 1.0,
                              double phase = 0.0, double v_period = kDefaultVelocityPeriod);
  /// Random real field with Gaussian amplitudes on |k|_inf <= kmax, |m|_inf <= mmax.
  static SpectralField random(int d, int kmax, int mmax, unsigned seed, double v_period = kDefaultVelocityPeriod);

  int d() const noexcept { return d_; }
  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }
  double v_period() const noexcept { return v_period_; }
  double v_step() const noexcept;  // lattice spacing of xi

  const std::map<ModeKey, Complex>& modes() const noexcept { return modes_; }
  /// Adds to the amplitude of a mode (the caller keeps Hermitian symmetry).
  void add(const ModeKey& key, Complex amplitude);
  Complex amplitude(const ModeKey& key) const;

  Vec xi(const ModeKey& key) const noexcept;
  bool is_hermitian(double tol = 1e-12) const;
  /// sum |a|^2 = mean of f^2 over a period cell.
  double energy() const;

  double operator()(std::span<const double> x, std::span<const double> v) const;

  /// Rows k..,m..,re,im with a leading "# d,time,v_period" line.
  void write_csv(std::ostream& os) const;
  static SpectralField read_csv(std::istream& is);

 private:
  int d_;
  double time_;
  double v_period_;
  std::map<ModeKey, Complex> modes_;
};

struct SourceMode {
  ModeKey key;       // k must be zero
  Complex amplitude;
  double omega = 0.0;  // time dependence e^{i omega t}, t absolute
};

/// c(t,x,v) = sum a e^{i(omega t + xi.v)}; only velocity modes, so characteristics stay put.
struct SourceSpec {
  int d = 1;
  double v_period = kDefaultVelocityPeriod;
  std::vector<SourceMode> modes;

  static SourceSpec none(int d, double v_period = kDefaultVelocityPeriod);
  /// a cos(xi_m.v + omega t + phase).
  void add_cosine(std::array<int, kMaxDim> m, double amplitude, double omega = 0.0, double phase = 0.0);

  bool empty() const noexcept { return modes.empty(); }
  double operator()(const Point& z) const;
};

/// psi(xi) with caching; closed form for stable-like kernels.
class SymbolTable {
 public:
  explicit SymbolTable(Kernel K, bool closed_form = true);
  double operator()(const Vec& xi) const;
  const Kernel& kernel() const noexcept { return K_; }

 private:
  Kernel K_;
  bool closed_;
  mutable std::mutex mu_;
  mutable std::map<Vec, double> cache_;
};

struct SolverOptions {
  double quad_tol = 1e-11;
  bool interpolate_off_lattice = false;
  int interpolation_radius = 64;  // lattice neighbours kept per off-lattice mode
  bool closed_form = true;        // stable-like kernels: exact symbol and decay integrals
};

/// int_0^t psi(xi - sigma k) d sigma, adaptive Gauss-Legendre split at the cusp.
double decay_exponent(const SymbolTable& psi, const Vec& xi, const Vec& k, int d, double t, double tol);

/// Field at time f0.time() + t.
SpectralField solve(const SpectralField& f0, const Kernel& K, const SourceSpec& c, double t,
                    const SolverOptions& options = {});
SpectralField solve(const SpectralField& f0, const SymbolTable& psi, const SourceSpec& c, double t,
                    const SolverOptions& options = {});

/// Pointwise evaluation of the solution for any time >= f0.time(); no lattice restriction.
class KineticSolution {
 public:
  KineticSolution(SpectralField f0, Kernel K, SourceSpec c, SolverOptions options = {});

  double operator()(const Point& z) const;
  double source(const Point& z) const { return c_(z); }
  SpectralField at(double t) const;
  double start_time() const noexcept { return f0_.time(); }
  int d() const noexcept { return f0_.d(); }

 private:
  Complex mode_factor(std::size_t i, double tau) const;

  SpectralField f0_;
  std::vector<std::pair<ModeKey, Complex>> initial_;
  std::shared_ptr<SymbolTable> psi_;
  SourceSpec c_;
  SolverOptions opt_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<std::size_t, double>, Complex> cache_;
};

/// Velocity and position axes of a physical evaluation grid (time comes from the fields).
struct PhaseGrid {
  int d = 1;
  std::vector<Axis> x;
  std::vector<Axis> v;

  std::size_t size() const;
  void point(std::size_t flat, Vec& x_out, Vec& v_out) const;
};

/// max over the grid of |f_t + v.grad_x f - L f - c| at the middle sample; f_t by the
/// 5-point stencil, which needs 5 equally spaced times.
double residual_check(const std::vector<SpectralField>& samples, const Kernel& K, const SourceSpec& c,
                      const PhaseGrid& grid);

/// Default stencil step: 2 pi / v_period, lattice compatible for every k.
double default_time_step(const SpectralField& f);

SampledField sample_to_grid(const SpectralField& f, const PhaseGrid& grid);

/// g(x, v) = f(x + x0 + t v0, v + v0) at the field's time t; solves the equation when f does.
SpectralField translate(const SpectralField& f, const Point& z0);

}  // namespace kinetic
