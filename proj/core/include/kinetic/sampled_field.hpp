#pragma once

// Scattered and gridded samples of a scalar field f(t, x, v).

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "kinetic/group.hpp"

namespace kinetic {

struct SampledField {
  int d = 1;
  std::vector<Point> points;
  std::vector<double> values;
  std::string metadata;

  SampledField() = default;
  SampledField(int d_, std::vector<Point> points_, std::vector<double> values_, std::string metadata_ = {});

  static SampledField from_function(int d, std::vector<Point> points,
                                    const std::function<double(const Point&)>& f,
                                    std::string metadata = {});

  std::size_t size() const noexcept { return points.size(); }

  /// Checks equal lengths, dimensions and finiteness. Distinctness is checked by validate_distinct.
  void validate() const;
  void validate_distinct() const;

  /// Subset of samples for which keep(point) is true.
  SampledField filter(const std::function<bool(const Point&)>& keep) const;

  /// CSV with header t,x0..,v0..,value. The metadata is written as a leading '#' comment line.
  void write_csv(std::ostream& os) const;
  static SampledField read_csv(std::istream& is);
};

/// One coordinate axis of a tensor grid; n = 1 denotes a frozen coordinate at lo.
struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  int n = 1;

  double at(int i) const noexcept { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
  double step() const noexcept { return n == 1 ? 0.0 : (hi - lo) / (n - 1); }
};

/// Regular tensor grid over the 1+2d coordinates (t, x_0.., v_0..), t slowest.
class GridField {
 public:
  GridField(int d, std::vector<Axis> axes);

  static GridField sample(int d, std::vector<Axis> axes, const std::function<double(const Point&)>& f);

  int d() const noexcept { return d_; }
  const std::vector<Axis>& axes() const noexcept { return axes_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::vector<int> multi_index(std::size_t flat) const;
  std::size_t flat_index(const std::vector<int>& idx) const;
  Point point(std::size_t flat) const;

  double& operator[](std::size_t flat) { return values_[flat]; }
  double operator[](std::size_t flat) const { return values_[flat]; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool contains(const Point& z, double slack = 1e-12) const;

  /// Tensor Lagrange interpolation with up to 4 nodes per axis (cubic when available).
  double interpolate(const Point& z) const;

  SampledField to_sampled(std::string metadata = {}) const;

  /// Every k-th node along each non-frozen axis.
  SampledField coarsened(int k) const;

 private:
  int d_;
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::vector<double> values_;
};

enum class DerivativeKind { transport, dx, dv, dt };

/// Second-order central differences on interior nodes (one layer dropped on every differentiated
/// axis). transport combines the t-stencil with v . (x-stencils) using the node's own v.
GridField derivative_field(const GridField& f, DerivativeKind which, int component = 0);

/// Kinetic degree of the operator: 2s for transport and dt, 1+2s for dx, 1 for dv.
double derivative_degree(DerivativeKind which, const ScalingExponent& s) noexcept;

}  // namespace kinetic
