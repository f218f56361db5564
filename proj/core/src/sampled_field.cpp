#include "kinetic/sampled_field.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace kinetic {

SampledField::SampledField(int d_, std::vector<Point> points_, std::vector<double> values_,
                           std::string metadata_)
    : d(d_), points(std::move(points_)), values(std::move(values_)), metadata(std::move(metadata_)) {
  validate();
}

SampledField SampledField::from_function(int d, std::vector<Point> points,
                                         const std::function<double(const Point&)>& f,
                                         std::string metadata) {
  std::vector<double> vals;
  vals.reserve(points.size());
  for (const auto& z : points) vals.push_back(f(z));
  return SampledField(d, std::move(points), std::move(vals), std::move(metadata));
}

void SampledField::validate() const {
  check_dim(d);
  if (points.size() != values.size()) throw std::invalid_argument("sampled field: points/values length mismatch");
  for (const auto& z : points) {
    if (z.d != d) throw std::invalid_argument("sampled field: point dimension differs from field");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("sampled field: non-finite value");
  }
}

void SampledField::validate_distinct() const {
  std::set<std::vector<double>> seen;
  for (const auto& z : points) {
    if (!seen.insert(z.flat()).second) {
      throw std::invalid_argument("sampled field: duplicate point " + to_string(z));
    }
  }
}

SampledField SampledField::filter(const std::function<bool(const Point&)>& keep) const {
  SampledField out;
  out.d = d;
  out.metadata = metadata;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (keep(points[i])) {
      out.points.push_back(points[i]);
      out.values.push_back(values[i]);
    }
  }
  return out;
}

void SampledField::write_csv(std::ostream& os) const {
  if (!metadata.empty()) {
    std::string flat = metadata;
    std::replace(flat.begin(), flat.end(), '\n', ' ');
    os << "# " << flat << '\n';
  }
  os << 't';
  for (int i = 0; i < d; ++i) os << ",x" << i;
  for (int i = 0; i < d; ++i) os << ",v" << i;
  os << ",value\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < points.size(); ++k) {
    for (double c : points[k].flat()) os << c << ',';
    os << values[k] << '\n';
  }
}

SampledField SampledField::read_csv(std::istream& is) {
  std::string line, meta;
  while (std::getline(is, line)) {
    if (line.rfind('#', 0) == 0) {
      meta = line.size() > 2 ? line.substr(2) : std::string{};
      continue;
    }
    if (!line.empty()) break;
  }
  // Header decides d.
  const auto cols = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  if (cols < 4 || (cols - 2) % 2 != 0 || line.rfind("t,", 0) != 0) {
    throw std::invalid_argument("sampled field CSV: bad header '" + line + "'");
  }
  const int d = (cols - 2) / 2;
  SampledField out;
  out.d = d;
  out.metadata = meta;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> rec;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        rec.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("sampled field CSV: bad number on line " + std::to_string(lineno));
      }
    }
    if (static_cast<int>(rec.size()) != cols) {
      throw std::invalid_argument("sampled field CSV: wrong column count on line " + std::to_string(lineno));
    }
    out.points.push_back(Point::from_flat(std::span<const double>(rec.data(), rec.size() - 1), d));
    out.values.push_back(rec.back());
  }
  out.validate();
  return out;
}

GridField::GridField(int d, std::vector<Axis> axes) : d_(d), axes_(std::move(axes)) {
  check_dim(d);
  if (static_cast<int>(axes_.size()) != 1 + 2 * d) throw std::invalid_argument("grid needs 1+2d axes");
  std::size_t total = 1;
  strides_.assign(axes_.size(), 1);
  for (int a = static_cast<int>(axes_.size()) - 1; a >= 0; --a) {
    const auto& ax = axes_[a];
    if (ax.n < 1 || (ax.n > 1 && !(ax.hi > ax.lo))) throw std::invalid_argument("grid axis is malformed");
    strides_[a] = total;
    total *= static_cast<std::size_t>(ax.n);
  }
  values_.assign(total, 0.0);
}

GridField GridField::sample(int d, std::vector<Axis> axes, const std::function<double(const Point&)>& f) {
  GridField g(d, std::move(axes));
  for (std::size_t i = 0; i < g.size(); ++i) g.values_[i] = f(g.point(i));
  return g;
}

std::vector<int> GridField::multi_index(std::size_t flat) const {
  std::vector<int> idx(axes_.size());
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    idx[a] = static_cast<int>(flat / strides_[a]);
    flat %= strides_[a];
  }
  return idx;
}

std::size_t GridField::flat_index(const std::vector<int>& idx) const {
  std::size_t f = 0;
  for (std::size_t a = 0; a < axes_.size(); ++a) f += static_cast<std::size_t>(idx[a]) * strides_[a];
  return f;
}

Point GridField::point(std::size_t flat) const {
  const auto idx = multi_index(flat);
  Point z = Point::zero(d_);
  z.t = axes_[0].at(idx[0]);
  for (int i = 0; i < d_; ++i) {
    z.x[i] = axes_[1 + i].at(idx[1 + i]);
    z.v[i] = axes_[1 + d_ + i].at(idx[1 + d_ + i]);
  }
  return z;
}

namespace {

double coord(const Point& z, int axis, int d) {
  if (axis == 0) return z.t;
  if (axis <= d) return z.x[axis - 1];
  return z.v[axis - 1 - d];
}

}  // namespace

bool GridField::contains(const Point& z, double slack) const {
  if (z.d != d_) return false;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    const double c = coord(z, static_cast<int>(a), d_);
    const auto& ax = axes_[a];
    const double tol = slack * (1.0 + std::abs(ax.lo) + std::abs(ax.hi));
    if (c < ax.lo - tol || c > (ax.n == 1 ? ax.lo : ax.hi) + tol) return false;
  }
  return true;
}

double GridField::interpolate(const Point& z) const {
  if (!contains(z, 1e-9)) throw std::invalid_argument("interpolate: point outside grid " + to_string(z));
  const std::size_t na = axes_.size();
  std::vector<int> first(na), count(na);
  std::vector<std::array<double, 4>> weights(na);
  for (std::size_t a = 0; a < na; ++a) {
    const auto& ax = axes_[a];
    if (ax.n == 1) {
      first[a] = 0;
      count[a] = 1;
      weights[a] = {1.0, 0, 0, 0};
      continue;
    }
    const int m = std::min(ax.n, 4);
    const double u = (coord(z, static_cast<int>(a), d_) - ax.lo) / ax.step();
    int f0 = static_cast<int>(std::floor(u)) - (m / 2 - 1);
    f0 = std::clamp(f0, 0, ax.n - m);
    first[a] = f0;
    count[a] = m;
    for (int i = 0; i < m; ++i) {
      double w = 1.0;
      for (int j = 0; j < m; ++j) {
        if (j != i) w *= (u - (f0 + j)) / static_cast<double>(i - j);
      }
      weights[a][i] = w;
    }
  }
  // Sum over the tensor stencil.
  double acc = 0.0;
  std::vector<int> off(na, 0), idx(na);
  while (true) {
    double w = 1.0;
    for (std::size_t a = 0; a < na; ++a) {
      idx[a] = first[a] + off[a];
      w *= weights[a][off[a]];
    }
    acc += w * values_[flat_index(idx)];
    std::size_t a = na;
    while (a-- > 0) {
      if (++off[a] < count[a]) break;
      off[a] = 0;
    }
    if (a == static_cast<std::size_t>(-1)) break;
  }
  return acc;
}

SampledField GridField::to_sampled(std::string metadata) const {
  SampledField out;
  out.d = d_;
  out.metadata = std::move(metadata);
  out.points.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.points.push_back(point(i));
  out.values = values_;
  return out;
}

SampledField GridField::coarsened(int k) const {
  if (k < 1) throw std::invalid_argument("coarsened: k must be >= 1");
  SampledField out;
  out.d = d_;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto idx = multi_index(i);
    bool keep = true;
    for (std::size_t a = 0; a < axes_.size(); ++a) keep = keep && idx[a] % k == 0;
    if (keep) {
      out.points.push_back(point(i));
      out.values.push_back(values_[i]);
    }
  }
  return out;
}

double derivative_degree(DerivativeKind which, const ScalingExponent& s) noexcept {
  switch (which) {
    case DerivativeKind::transport:
    case DerivativeKind::dt: return s.two_s();
    case DerivativeKind::dx: return 1.0 + s.two_s();
    case DerivativeKind::dv: return 1.0;
  }
  return 0.0;
}

GridField derivative_field(const GridField& f, DerivativeKind which, int component) {
  const int d = f.d();
  if (component < 0 || component >= d) throw std::invalid_argument("derivative_field: component out of range");
  std::vector<int> diff_axes;
  switch (which) {
    case DerivativeKind::transport:
      diff_axes.push_back(0);
      for (int i = 0; i < d; ++i) diff_axes.push_back(1 + i);
      break;
    case DerivativeKind::dt: diff_axes.push_back(0); break;
    case DerivativeKind::dx: diff_axes.push_back(1 + component); break;
    case DerivativeKind::dv: diff_axes.push_back(1 + d + component); break;
  }
  auto axes = f.axes();
  for (int a : diff_axes) {
    if (axes[a].n < 3) throw std::invalid_argument("derivative_field: grid too coarse for the stencil");
    const double h = axes[a].step();
    axes[a] = Axis{axes[a].lo + h, axes[a].hi - h, axes[a].n - 2};
  }
  GridField out(d, axes);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto idx = out.multi_index(i);
    for (int a : diff_axes) idx[a] += 1;
    const Point z = f.point(f.flat_index(idx));
    auto central = [&](int a) {
      auto hi = idx, lo = idx;
      hi[a] += 1;
      lo[a] -= 1;
      return (f[f.flat_index(hi)] - f[f.flat_index(lo)]) / (2.0 * f.axes()[a].step());
    };
    double val = 0.0;
    if (which == DerivativeKind::transport) {
      val = central(0);
      for (int c = 0; c < d; ++c) val += z.v[c] * central(1 + c);
    } else {
      val = central(diff_axes[0]);
    }
    out[i] = val;
  }
  return out;
}

}  // namespace kinetic
