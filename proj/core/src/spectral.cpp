#include "kinetic/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "kinetic/error.hpp"

namespace kinetic {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec to_vec(const std::array<int, kMaxDim>& a) {
  Vec v{};
  for (int i = 0; i < kMaxDim; ++i) v[i] = a[i];
  return v;
}

// (1 - e^{-w}) / w
Complex phi1(Complex w) {
  if (std::abs(w) < 1e-3) return 1.0 - w / 2.0 + w * w / 6.0 - w * w * w / 24.0;
  return (1.0 - std::exp(-w)) / w;
}

// int_0^t e^{-psi (t - tau)} e^{i omega (T + tau)} d tau
Complex duhamel(double psi, double omega, double T, double t) {
  const Complex w(psi * t, omega * t);
  return std::exp(Complex(0.0, omega * (T + t))) * t * phi1(w);
}

void check_key_dim(const ModeKey& key, int d) {
  for (int i = d; i < kMaxDim; ++i) {
    if (key.k[i] != 0 || key.m[i] != 0) throw std::invalid_argument("spectral: mode index beyond the dimension");
  }
}

double gauss_segment(const std::function<double(double)>& g, double a, double b, int n) {
  const auto& rule = gauss_legendre(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  CompensatedSum acc;
  for (int i = 0; i < n; ++i) acc += rule.weights[i] * g(c + h * rule.nodes[i]);
  return h * acc.value();
}

double adaptive(const std::function<double(double)>& g, double a, double b, double tol, int depth) {
  const double fine = gauss_segment(g, a, b, 64);
  const double coarse = gauss_segment(g, a, b, 32);
  if (std::abs(fine - coarse) <= tol) return fine;
  if (depth >= 48) throw ConvergenceError("decay_exponent: adaptive quadrature did not converge");
  const double m = 0.5 * (a + b);
  return adaptive(g, a, m, 0.5 * tol, depth + 1) + adaptive(g, m, b, 0.5 * tol, depth + 1);
}

}  // namespace

ModeKey ModeKey::conjugate() const noexcept {
  ModeKey c;
  for (int i = 0; i < kMaxDim; ++i) {
    c.k[i] = -k[i];
    c.m[i] = -m[i];
  }
  return c;
}

SpectralField::SpectralField(int d, double time, double v_period) : d_(d), time_(time), v_period_(v_period) {
  check_dim(d);
  if (!(v_period > 0.0)) throw std::invalid_argument("spectral: velocity period must be positive");
}

SpectralField SpectralField::cosine(int d, std::array<int, kMaxDim> k, std::array<int, kMaxDim> m, double amplitude,
                                    double phase, double v_period) {
  SpectralField f(d, 0.0, v_period);
  ModeKey key{k, m};
  check_key_dim(key, d);
  const Complex a = 0.5 * amplitude * std::exp(Complex(0.0, phase));
  f.add(key, a);
  f.add(key.conjugate(), std::conj(a));
  return f;
}

SpectralField SpectralField::random(int d, int kmax, int mmax, unsigned seed, double v_period) {
  SpectralField f(d, 0.0, v_period);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<ModeKey> keys;
  const int nk = 2 * kmax + 1, nm = 2 * mmax + 1;
  long total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<long>(nk) * nm;
  for (long flat = 0; flat < total; ++flat) {
    ModeKey key;
    long r = flat;
    for (int i = 0; i < d; ++i) {
      key.k[i] = static_cast<int>(r % nk) - kmax;
      r /= nk;
      key.m[i] = static_cast<int>(r % nm) - mmax;
      r /= nm;
    }
    keys.push_back(key);
  }
  for (const auto& key : keys) {
    const ModeKey c = key.conjugate();
    if (c < key) continue;
    if (c == key) {
      f.add(key, g(rng));
    } else {
      const Complex a(g(rng), g(rng));
      f.add(key, 0.5 * a);
      f.add(c, 0.5 * std::conj(a));
    }
  }
  return f;
}

double SpectralField::v_step() const noexcept { return kTwoPi / v_period_; }

void SpectralField::add(const ModeKey& key, Complex amplitude) {
  check_key_dim(key, d_);
  if (amplitude == Complex(0.0)) return;
  auto [it, inserted] = modes_.emplace(key, amplitude);
  if (!inserted) {
    it->second += amplitude;
    if (it->second == Complex(0.0)) modes_.erase(it);
  }
}

Complex SpectralField::amplitude(const ModeKey& key) const {
  auto it = modes_.find(key);
  return it == modes_.end() ? Complex(0.0) : it->second;
}

Vec SpectralField::xi(const ModeKey& key) const noexcept {
  Vec x{};
  for (int i = 0; i < d_; ++i) x[i] = key.m[i] * v_step();
  return x;
}

bool SpectralField::is_hermitian(double tol) const {
  for (const auto& [key, a] : modes_) {
    if (std::abs(amplitude(key.conjugate()) - std::conj(a)) > tol) return false;
  }
  return true;
}

double SpectralField::energy() const {
  double e = 0.0;
  for (const auto& [key, a] : modes_) e += std::norm(a);
  return e;
}

double SpectralField::operator()(std::span<const double> x, std::span<const double> v) const {
  if (static_cast<int>(x.size()) != d_ || static_cast<int>(v.size()) != d_) {
    throw std::invalid_argument("spectral: evaluation dimension mismatch");
  }
  CompensatedSum acc;
  for (const auto& [key, a] : modes_) {
    double th = 0.0;
    for (int i = 0; i < d_; ++i) th += key.k[i] * x[i] + key.m[i] * v_step() * v[i];
    acc += a.real() * std::cos(th) - a.imag() * std::sin(th);
  }
  return acc.value();
}

void SpectralField::write_csv(std::ostream& os) const {
  const auto prec = os.precision(17);
  os << "# " << d_ << ',' << time_ << ',' << v_period_ << '\n';
  for (int i = 0; i < d_; ++i) os << 'k' << i << ',';
  for (int i = 0; i < d_; ++i) os << 'm' << i << ',';
  os << "re,im\n";
  for (const auto& [key, a] : modes_) {
    for (int i = 0; i < d_; ++i) os << key.k[i] << ',';
    for (int i = 0; i < d_; ++i) os << key.m[i] << ',';
    os << a.real() << ',' << a.imag() << '\n';
  }
  os.precision(prec);
}

SpectralField SpectralField::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw std::invalid_argument("spectral csv: missing header");
  int d = 0;
  double t = 0.0, P = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream hs(line.substr(2));
  if (!(hs >> d >> c1 >> t >> c2 >> P)) throw std::invalid_argument("spectral csv: bad header");
  SpectralField f(d, t, P);
  if (!std::getline(is, line)) throw std::invalid_argument("spectral csv: missing column line");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    ModeKey key;
    for (int i = 0; i < d; ++i) ls >> key.k[i];
    for (int i = 0; i < d; ++i) ls >> key.m[i];
    double re = 0.0, im = 0.0;
    if (!(ls >> re >> im)) throw std::invalid_argument("spectral csv: bad row");
    f.add(key, Complex(re, im));
  }
  return f;
}

SourceSpec SourceSpec::none(int d, double v_period) {
  SourceSpec c;
  c.d = d;
  c.v_period = v_period;
  return c;
}

void SourceSpec::add_cosine(std::array<int, kMaxDim> m, double amplitude, double omega, double phase) {
  ModeKey key{{}, m};
  check_key_dim(key, d);
  const Complex a = 0.5 * amplitude * std::exp(Complex(0.0, phase));
  modes.push_back({key, a, omega});
  modes.push_back({key.conjugate(), std::conj(a), -omega});
}

double SourceSpec::operator()(const Point& z) const {
  if (z.d != d) throw std::invalid_argument("source: dimension mismatch");
  double acc = 0.0;
  for (const auto& s : modes) {
    double th = s.omega * z.t;
    for (int i = 0; i < d; ++i) th += s.key.m[i] * (kTwoPi / v_period) * z.v[i];
    acc += s.amplitude.real() * std::cos(th) - s.amplitude.imag() * std::sin(th);
  }
  return acc;
}

SymbolTable::SymbolTable(Kernel K, bool closed_form)
    : K_(std::move(K)), closed_(closed_form && K_.form() == KernelForm::stable_like && K_.depth() == 0.0) {}

double SymbolTable::operator()(const Vec& xi) const {
  const int d = K_.d();
  if (closed_) {
    const auto& rule = K_.sphere();
    const double c = K_.near_coefficient() * stable_symbol_constant(K_.s());
    CompensatedSum acc;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      double w = 0.0;
      for (int j = 0; j < d; ++j) w += rule.directions[i][j] * xi[j];
      if (w != 0.0) acc += rule.weights[i] * K_.angular(i) * std::pow(std::abs(w), K_.s().two_s());
    }
    // each antipodal pair carries the full radial integral once per direction
    return c * acc.value();
  }
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(xi);
    if (it != cache_.end()) return it->second;
  }
  const double v = symbol(K_, std::span<const double>(xi.data(), d));
  std::lock_guard lock(mu_);
  cache_.emplace(xi, v);
  return v;
}

double decay_exponent(const SymbolTable& psi, const Vec& xi, const Vec& k, int d, double t, double tol) {
  if (t < 0.0) throw std::invalid_argument("decay_exponent: negative time");
  if (t == 0.0) return 0.0;
  double kk = 0.0, xk = 0.0;
  for (int i = 0; i < d; ++i) {
    kk += k[i] * k[i];
    xk += xi[i] * k[i];
  }
  if (kk == 0.0) return t * psi(xi);
  const Kernel& K = psi.kernel();
  if (d == 1 && K.form() == KernelForm::stable_like && K.depth() == 0.0) {
    // C |u|^{2s} along u = xi - sigma k
    const Vec one{1.0};
    const double C = psi(one);
    const double p = K.s().two_s() + 1.0;
    auto F = [p](double u) { return std::copysign(std::pow(std::abs(u), p), u) / p; };
    return C * (F(xi[0]) - F(xi[0] - t * k[0])) / k[0];
  }
  auto g = [&](double sigma) {
    Vec u{};
    for (int i = 0; i < d; ++i) u[i] = xi[i] - sigma * k[i];
    return psi(u);
  };
  const double cusp = xk / kk;
  const double scale = std::max(1.0, t * std::max(psi(xi), 1.0));
  if (cusp > 0.0 && cusp < t) return adaptive(g, 0.0, cusp, 0.5 * tol * scale, 0) + adaptive(g, cusp, t, 0.5 * tol * scale, 0);
  return adaptive(g, 0.0, t, tol * scale, 0);
}

SpectralField solve(const SpectralField& f0, const Kernel& K, const SourceSpec& c, double t,
                    const SolverOptions& options) {
  const SymbolTable psi(K, options.closed_form);
  return solve(f0, psi, c, t, options);
}

SpectralField solve(const SpectralField& f0, const SymbolTable& psi, const SourceSpec& c, double t,
                    const SolverOptions& opt) {
  const int d = f0.d();
  if (psi.kernel().d() != d) throw std::invalid_argument("solve: kernel dimension mismatch");
  if (!(t >= 0.0)) throw std::invalid_argument("solve: time must be nonnegative");
  if (!c.empty() && (c.d != d || c.v_period != f0.v_period())) {
    throw std::invalid_argument("solve: source lattice differs from the field");
  }
  SpectralField out(d, f0.time() + t, f0.v_period());
  const double lattice = f0.v_period() / kTwoPi;
  for (const auto& [key, a] : f0.modes()) {
    const Vec xi = f0.xi(key);
    const Vec k = to_vec(key.k);
    const Complex amp = a * std::exp(-decay_exponent(psi, xi, k, d, t, opt.quad_tol));
    ModeKey target = key;
    bool on = true;
    std::array<double, kMaxDim> shift{};
    for (int i = 0; i < d; ++i) {
      shift[i] = t * key.k[i] * lattice;
      const double r = std::round(shift[i]);
      if (std::abs(shift[i] - r) > 1e-9 * std::max(1.0, std::abs(shift[i]))) on = false;
      target.m[i] = key.m[i] - static_cast<int>(r);
    }
    if (on) {
      out.add(target, amp);
      continue;
    }
    if (!opt.interpolate_off_lattice) {
      throw std::domain_error("solve: time moves a mode off the velocity lattice; use a lattice-compatible time "
                              "or enable interpolation");
    }
    if (d != 1) throw std::domain_error("solve: off-lattice interpolation is implemented for d = 1");
    // Projection of e^{i xi' v} onto the lattice.
    const double target_m = key.m[0] - shift[0];
    const int centre = static_cast<int>(std::lround(target_m));
    const double P = f0.v_period();
    for (int n = centre - opt.interpolation_radius; n <= centre + opt.interpolation_radius; ++n) {
      const double delta = (target_m - n) * kTwoPi / P;
      // over the centred cell [-P/2, P/2)
      const double h = 0.5 * delta * P;
      const double w = h == 0.0 ? 1.0 : std::sin(h) / h;
      ModeKey nk = key;
      nk.m[0] = n;
      out.add(nk, amp * w);
    }
  }
  for (const auto& s : c.modes) {
    for (int i = 0; i < kMaxDim; ++i) {
      if (s.key.k[i] != 0) throw std::invalid_argument("solve: sources must not depend on x");
    }
    const double p = psi(f0.xi(s.key));
    out.add(s.key, s.amplitude * duhamel(p, s.omega, f0.time(), t));
  }
  return out;
}

KineticSolution::KineticSolution(SpectralField f0, Kernel K, SourceSpec c, SolverOptions options)
    : f0_(std::move(f0)),
      initial_(f0_.modes().begin(), f0_.modes().end()),
      psi_(std::make_shared<SymbolTable>(std::move(K), options.closed_form)),
      c_(std::move(c)),
      opt_(options) {
  if (psi_->kernel().d() != f0_.d()) throw std::invalid_argument("solution: kernel dimension mismatch");
  if (!c_.empty() && (c_.d != f0_.d() || c_.v_period != f0_.v_period())) {
    throw std::invalid_argument("solution: source lattice differs from the field");
  }
  for (const auto& s : c_.modes) {
    for (int i = 0; i < kMaxDim; ++i) {
      if (s.key.k[i] != 0) throw std::invalid_argument("solution: sources must not depend on x");
    }
  }
}

Complex KineticSolution::mode_factor(std::size_t i, double tau) const {
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find({i, tau});
    if (it != cache_.end()) return it->second;
  }
  Complex v;
  const int d = f0_.d();
  if (i < initial_.size()) {
    const auto& [key, a] = initial_[i];
    v = a * std::exp(-decay_exponent(*psi_, f0_.xi(key), to_vec(key.k), d, tau, opt_.quad_tol));
  } else {
    const auto& s = c_.modes[i - initial_.size()];
    v = s.amplitude * duhamel((*psi_)(f0_.xi(s.key)), s.omega, f0_.time(), tau);
  }
  std::lock_guard lock(mu_);
  cache_.emplace(std::make_pair(i, tau), v);
  return v;
}

double KineticSolution::operator()(const Point& z) const {
  const int d = f0_.d();
  if (z.d != d) throw std::invalid_argument("solution: dimension mismatch");
  const double tau = z.t - f0_.time();
  if (tau < 0.0) throw std::invalid_argument("solution: time before the initial time");
  const double h = f0_.v_step();
  CompensatedSum acc;
  for (std::size_t i = 0; i < initial_.size(); ++i) {
    const auto& key = initial_[i].first;
    double th = 0.0;
    for (int j = 0; j < d; ++j) th += key.k[j] * z.x[j] + (key.m[j] * h - tau * key.k[j]) * z.v[j];
    const Complex a = mode_factor(i, tau);
    acc += a.real() * std::cos(th) - a.imag() * std::sin(th);
  }
  for (std::size_t i = 0; i < c_.modes.size(); ++i) {
    double th = 0.0;
    for (int j = 0; j < d; ++j) th += c_.modes[i].key.m[j] * h * z.v[j];
    const Complex a = mode_factor(initial_.size() + i, tau);
    acc += a.real() * std::cos(th) - a.imag() * std::sin(th);
  }
  return acc.value();
}

SpectralField KineticSolution::at(double t) const { return solve(f0_, *psi_, c_, t - f0_.time(), opt_); }

std::size_t PhaseGrid::size() const {
  if (static_cast<int>(x.size()) != d || static_cast<int>(v.size()) != d) {
    throw std::invalid_argument("phase grid: axis count must equal d");
  }
  std::size_t n = 1;
  for (const auto& a : x) n *= static_cast<std::size_t>(a.n);
  for (const auto& a : v) n *= static_cast<std::size_t>(a.n);
  return n;
}

void PhaseGrid::point(std::size_t flat, Vec& x_out, Vec& v_out) const {
  for (int i = d - 1; i >= 0; --i) {
    v_out[i] = v[i].at(static_cast<int>(flat % v[i].n));
    flat /= v[i].n;
  }
  for (int i = d - 1; i >= 0; --i) {
    x_out[i] = x[i].at(static_cast<int>(flat % x[i].n));
    flat /= x[i].n;
  }
}

double default_time_step(const SpectralField& f) { return kTwoPi / f.v_period(); }

double residual_check(const std::vector<SpectralField>& samples, const Kernel& K, const SourceSpec& c,
                      const PhaseGrid& grid) {
  if (samples.size() < 5) throw std::invalid_argument("residual_check: need at least 5 time samples");
  const std::size_t mid = samples.size() / 2;
  const int d = samples[mid].d();
  if (grid.d != d || K.d() != d) throw std::invalid_argument("residual_check: mismatched grids");
  for (const auto& s : samples) {
    if (s.d() != d || s.v_period() != samples[mid].v_period()) throw std::invalid_argument("residual_check: mismatched grids");
  }
  const double h = samples[mid + 1].time() - samples[mid].time();
  if (!(h > 0.0)) throw std::invalid_argument("residual_check: times must increase");
  for (std::size_t j = mid - 2; j < mid + 2; ++j) {
    if (std::abs(samples[j + 1].time() - samples[j].time() - h) > 1e-12 * std::max(1.0, std::abs(h))) {
      throw std::invalid_argument("residual_check: stencil times must be equally spaced");
    }
  }
  if (!c.empty() && (c.d != d || c.v_period != samples[mid].v_period())) {
    throw std::invalid_argument("residual_check: source lattice differs from the field");
  }
  const SymbolTable psi(K);
  const SpectralField& f = samples[mid];
  std::vector<std::pair<ModeKey, Complex>> modes(f.modes().begin(), f.modes().end());
  std::vector<double> sym(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) sym[i] = psi(f.xi(modes[i].first));

  const std::size_t n = grid.size();
  double worst = 0.0;
  Vec x{}, v{};
  for (std::size_t p = 0; p < n; ++p) {
    grid.point(p, x, v);
    const std::span<const double> xs(x.data(), d), vs(v.data(), d);
    const double ft = (samples[mid - 2](xs, vs) - 8.0 * samples[mid - 1](xs, vs) + 8.0 * samples[mid + 1](xs, vs) -
                       samples[mid + 2](xs, vs)) /
                      (12.0 * h);
    CompensatedSum transport, Lf;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const auto& [key, a] = modes[i];
      double th = 0.0, kv = 0.0;
      for (int j = 0; j < d; ++j) {
        th += key.k[j] * x[j] + key.m[j] * f.v_step() * v[j];
        kv += key.k[j] * v[j];
      }
      const Complex e = a * Complex(std::cos(th), std::sin(th));
      transport += (Complex(0.0, kv) * e).real();
      Lf += -sym[i] * e.real();
    }
    Point z = Point::zero(d);
    z.t = f.time();
    for (int j = 0; j < d; ++j) {
      z.x[j] = x[j];
      z.v[j] = v[j];
    }
    const double cz = c.empty() ? 0.0 : c(z);
    worst = std::max(worst, std::abs(ft + transport.value() - Lf.value() - cz));
  }
  return worst;
}

SampledField sample_to_grid(const SpectralField& f, const PhaseGrid& grid) {
  const int d = f.d();
  if (grid.d != d) throw std::invalid_argument("sample_to_grid: dimension mismatch");
  const std::size_t n = grid.size();
  std::vector<Point> pts;
  std::vector<double> vals;
  pts.reserve(n);
  vals.reserve(n);
  Vec x{}, v{};
  for (std::size_t p = 0; p < n; ++p) {
    grid.point(p, x, v);
    Point z = Point::zero(d);
    z.t = f.time();
    for (int j = 0; j < d; ++j) {
      z.x[j] = x[j];
      z.v[j] = v[j];
    }
    pts.push_back(z);
    vals.push_back(f(std::span<const double>(x.data(), d), std::span<const double>(v.data(), d)));
  }
  return SampledField(d, std::move(pts), std::move(vals), "spectral t=" + std::to_string(f.time()));
}

SpectralField translate(const SpectralField& f, const Point& z0) {
  if (z0.d != f.d()) throw std::invalid_argument("translate: dimension mismatch");
  if (z0.t != 0.0) throw std::invalid_argument("translate: only (0, x0, v0) shifts act within one time slice");
  SpectralField g(f.d(), f.time(), f.v_period());
  for (const auto& [key, a] : f.modes()) {
    double ph = 0.0;
    for (int i = 0; i < f.d(); ++i) {
      ph += key.k[i] * (z0.x[i] + f.time() * z0.v[i]) + key.m[i] * f.v_step() * z0.v[i];
    }
    g.add(key, a * std::exp(Complex(0.0, ph)));
  }
  return g;
}

}  // namespace kinetic
