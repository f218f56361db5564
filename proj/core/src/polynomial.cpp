#include "kinetic/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"
#include "kinetic/sampling.hpp"
#include "kinetic/simplex.hpp"

namespace kinetic {

MultiIndex::MultiIndex(int jt_, std::array<int, kMaxDim> jx_, std::array<int, kMaxDim> jv_, int d_)
    : jt(jt_), jx(jx_), jv(jv_), d(d_) {
  check_dim(d);
  bool ok = jt >= 0;
  for (int i = 0; i < kMaxDim; ++i) {
    ok = ok && jx[i] >= 0 && jv[i] >= 0;
    if (i >= d && (jx[i] != 0 || jv[i] != 0)) {
      throw std::invalid_argument("multi-index has entries beyond dimension d");
    }
  }
  if (!ok) throw std::invalid_argument("multi-index entries must be nonnegative");
}

MultiIndex MultiIndex::constant(int d) { return MultiIndex(0, {}, {}, d); }

MultiIndex MultiIndex::t_power(int k, int d) { return MultiIndex(k, {}, {}, d); }

MultiIndex MultiIndex::x_power(int i, int k, int d) {
  std::array<int, kMaxDim> jx{};
  jx.at(i) = k;
  return MultiIndex(0, jx, {}, d);
}

MultiIndex MultiIndex::v_power(int i, int k, int d) {
  std::array<int, kMaxDim> jv{};
  jv.at(i) = k;
  return MultiIndex(0, {}, jv, d);
}

int MultiIndex::x_order() const noexcept { return std::accumulate(jx.begin(), jx.end(), 0); }
int MultiIndex::v_order() const noexcept { return std::accumulate(jv.begin(), jv.end(), 0); }
int MultiIndex::plain_order() const noexcept { return x_order() + v_order(); }
int MultiIndex::scaled_order() const noexcept { return jt + x_order(); }

namespace {

double ipow(double base, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

}  // namespace

double MultiIndex::eval(const Point& z) const {
  if (z.d != d) throw std::invalid_argument("monomial and point dimensions differ");
  double r = ipow(z.t, jt);
  for (int i = 0; i < d; ++i) r *= ipow(z.x[i], jx[i]) * ipow(z.v[i], jv[i]);
  return r;
}

double kinetic_degree(const MultiIndex& j, const ScalingExponent& s) noexcept {
  return static_cast<double>(j.plain_order()) + s.two_s() * static_cast<double>(j.scaled_order());
}

int compare_degree(const MultiIndex& j, double threshold, const ScalingExponent& s) {
  if (auto q = s.rational()) {
    // deg = (plain*den + 2*num*scaled)/den exactly.
    const long num = q->first, den = q->second;
    const long scaled_num = static_cast<long>(j.plain_order()) * den + 2 * num * j.scaled_order();
    const double tau_den = threshold * static_cast<double>(den);
    const double nearest = std::round(tau_den);
    if (std::abs(tau_den - nearest) <= 1e-9 * std::max(1.0, std::abs(tau_den))) {
      const long t = static_cast<long>(nearest);
      return scaled_num < t ? -1 : (scaled_num == t ? 0 : 1);
    }
    return static_cast<double>(scaled_num) < tau_den ? -1 : 1;
  }
  const double deg = kinetic_degree(j, s);
  const double tol = 1e-12 * std::max(1.0, std::abs(threshold));
  if (deg < threshold - tol) return -1;
  if (deg > threshold + tol) return 1;
  return 0;
}

namespace {

std::vector<MultiIndex> enumerate_basis(double threshold, const ScalingExponent& s, int d,
                                        bool inclusive) {
  check_dim(d);
  if (!(threshold > 0.0)) throw std::invalid_argument("basis threshold must be positive");
  std::vector<MultiIndex> out;
  const int max_t = static_cast<int>(std::floor(threshold / s.two_s())) + 1;
  const int max_x = static_cast<int>(std::floor(threshold / (1.0 + s.two_s()))) + 1;
  const int max_v = static_cast<int>(std::floor(threshold)) + 1;

  // Enumerate x and v exponent tuples recursively.
  std::vector<std::array<int, kMaxDim>> xs, vs;
  auto tuples = [d](int cap, std::vector<std::array<int, kMaxDim>>& dst) {
    std::array<int, kMaxDim> cur{};
    auto rec = [&](auto&& self, int i, int left) -> void {
      if (i == d) {
        dst.push_back(cur);
        return;
      }
      for (int k = 0; k <= left; ++k) {
        cur[i] = k;
        self(self, i + 1, left - k);
      }
      cur[i] = 0;
    };
    rec(rec, 0, cap);
  };
  tuples(max_x, xs);
  tuples(max_v, vs);

  for (int jt = 0; jt <= max_t; ++jt) {
    for (const auto& jx : xs) {
      for (const auto& jv : vs) {
        MultiIndex j(jt, jx, jv, d);
        const int c = compare_degree(j, threshold, s);
        if (c < 0 || (inclusive && c == 0)) out.push_back(j);
      }
    }
  }
  std::sort(out.begin(), out.end(), [&s](const MultiIndex& a, const MultiIndex& b) {
    const double ka = kinetic_degree(a, s), kb = kinetic_degree(b, s);
    if (ka != kb && std::abs(ka - kb) > 1e-12) return ka < kb;
    return a < b;
  });
  return out;
}

}  // namespace

std::vector<MultiIndex> monomial_basis(double threshold, const ScalingExponent& s, int d) {
  return enumerate_basis(threshold, s, d, false);
}

std::vector<MultiIndex> monomial_basis_upto(double degree, const ScalingExponent& s, int d) {
  if (degree == 0.0) return {MultiIndex::constant(d)};
  return enumerate_basis(degree, s, d, true);
}

std::string to_string(const MultiIndex& j) {
  std::ostringstream os;
  bool any = false;
  auto put = [&](const char* name, int idx, int e) {
    if (e == 0) return;
    if (any) os << '*';
    os << name;
    if (idx >= 0 && j.d > 1) os << idx;
    if (e > 1) os << '^' << e;
    any = true;
  };
  put("t", -1, j.jt);
  for (int i = 0; i < j.d; ++i) put("x", i, j.jx[i]);
  for (int i = 0; i < j.d; ++i) put("v", i, j.jv[i]);
  if (!any) os << '1';
  return os.str();
}

KineticPolynomial::KineticPolynomial(ScalingExponent s, int d) : s_(s), d_(d) { check_dim(d); }

KineticPolynomial KineticPolynomial::constant(double c, ScalingExponent s, int d) {
  KineticPolynomial p(s, d);
  p.add_term(MultiIndex::constant(d), c);
  return p;
}

KineticPolynomial KineticPolynomial::monomial(const MultiIndex& j, double c, ScalingExponent s) {
  KineticPolynomial p(s, j.d);
  p.add_term(j, c);
  return p;
}

void KineticPolynomial::add_term(const MultiIndex& j, double c) {
  if (j.d != d_) throw std::invalid_argument("monomial dimension differs from polynomial");
  if (!std::isfinite(c)) throw std::invalid_argument("polynomial coefficients must be finite");
  if (c == 0.0) return;
  auto it = terms_.find(j);
  if (it == terms_.end()) {
    terms_.emplace(j, c);
    return;
  }
  it->second += c;
  if (it->second == 0.0) terms_.erase(it);
}

double KineticPolynomial::coefficient(const MultiIndex& j) const {
  auto it = terms_.find(j);
  return it == terms_.end() ? 0.0 : it->second;
}

double KineticPolynomial::degree() const {
  double deg = 0.0;
  for (const auto& [j, c] : terms_) deg = std::max(deg, kinetic_degree(j, s_));
  return deg;
}

double KineticPolynomial::eval(const Point& z) const {
  if (z.d != d_) throw std::invalid_argument("polynomial and point dimensions differ");
  double acc = 0.0;
  for (const auto& [j, c] : terms_) acc += c * j.eval(z);
  return acc;
}

void KineticPolynomial::prune(double eps) {
  double big = 0.0;
  for (const auto& [j, c] : terms_) big = std::max(big, std::abs(c));
  std::erase_if(terms_, [&](const auto& kv) { return std::abs(kv.second) <= eps * big; });
}

void KineticPolynomial::check_compatible(const KineticPolynomial& o) const {
  if (o.d_ != d_ || !(o.s_ == s_)) {
    throw std::invalid_argument("polynomials with different dimension or exponent");
  }
}

KineticPolynomial KineticPolynomial::operator+(const KineticPolynomial& o) const {
  check_compatible(o);
  KineticPolynomial r = *this;
  for (const auto& [j, c] : o.terms_) r.add_term(j, c);
  return r;
}

KineticPolynomial KineticPolynomial::operator-(const KineticPolynomial& o) const {
  return *this + o * -1.0;
}

KineticPolynomial KineticPolynomial::operator*(double c) const {
  KineticPolynomial r(s_, d_);
  for (const auto& [j, a] : terms_) r.add_term(j, a * c);
  return r;
}

KineticPolynomial KineticPolynomial::operator*(const KineticPolynomial& o) const {
  check_compatible(o);
  KineticPolynomial r(s_, d_);
  for (const auto& [ja, a] : terms_) {
    for (const auto& [jb, b] : o.terms_) {
      MultiIndex j = ja;
      j.jt += jb.jt;
      for (int i = 0; i < d_; ++i) {
        j.jx[i] += jb.jx[i];
        j.jv[i] += jb.jv[i];
      }
      r.add_term(j, a * b);
    }
  }
  return r;
}

KineticPolynomial KineticPolynomial::dt() const {
  KineticPolynomial r(s_, d_);
  for (const auto& [key, c] : terms_) {
    if (key.jt == 0) continue;
    MultiIndex j = key;
    const double f = c * j.jt;
    j.jt -= 1;
    r.add_term(j, f);
  }
  return r;
}

KineticPolynomial KineticPolynomial::dx(int i) const {
  if (i < 0 || i >= d_) throw std::invalid_argument("dx: component out of range");
  KineticPolynomial r(s_, d_);
  for (const auto& [key, c] : terms_) {
    if (key.jx[i] == 0) continue;
    MultiIndex j = key;
    const double f = c * j.jx[i];
    j.jx[i] -= 1;
    r.add_term(j, f);
  }
  return r;
}

KineticPolynomial KineticPolynomial::dv(int i) const {
  if (i < 0 || i >= d_) throw std::invalid_argument("dv: component out of range");
  KineticPolynomial r(s_, d_);
  for (const auto& [key, c] : terms_) {
    if (key.jv[i] == 0) continue;
    MultiIndex j = key;
    const double f = c * j.jv[i];
    j.jv[i] -= 1;
    r.add_term(j, f);
  }
  return r;
}

KineticPolynomial KineticPolynomial::transport() const {
  KineticPolynomial r = dt();
  for (int i = 0; i < d_; ++i) {
    r = r + dx(i) * monomial(MultiIndex::v_power(i, 1, d_), 1.0, s_);
  }
  return r;
}

KineticPolynomial left_translate(const KineticPolynomial& p, const Point& z0) {
  if (z0.d != p.d()) throw std::invalid_argument("left_translate: dimension mismatch");
  const int d = p.d();
  const auto& s = p.s();
  auto lin = [&](double c0, std::initializer_list<std::pair<MultiIndex, double>> parts) {
    KineticPolynomial q = KineticPolynomial::constant(c0, s, d);
    for (const auto& [j, c] : parts) q.add_term(j, c);
    return q;
  };
  // Substitution t -> t0 + t, x -> x0 + x + t v0, v -> v0 + v.
  const KineticPolynomial T = lin(z0.t, {{MultiIndex::t_power(1, d), 1.0}});
  std::array<KineticPolynomial, kMaxDim> X{T, T, T}, V{T, T, T};
  for (int i = 0; i < d; ++i) {
    X[i] = lin(z0.x[i], {{MultiIndex::x_power(i, 1, d), 1.0}, {MultiIndex::t_power(1, d), z0.v[i]}});
    V[i] = lin(z0.v[i], {{MultiIndex::v_power(i, 1, d), 1.0}});
  }
  auto power = [&](const KineticPolynomial& base, int e) {
    KineticPolynomial r = KineticPolynomial::constant(1.0, s, d);
    for (int k = 0; k < e; ++k) r = r * base;
    return r;
  };
  KineticPolynomial out(s, d);
  for (const auto& [j, c] : p.terms()) {
    KineticPolynomial term = power(T, j.jt) * c;
    for (int i = 0; i < d; ++i) term = term * power(X[i], j.jx[i]) * power(V[i], j.jv[i]);
    out = out + term;
  }
  return out;
}

KineticPolynomial scale_poly(const KineticPolynomial& p, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("scale_poly: R must be positive");
  KineticPolynomial out(p.s(), p.d());
  for (const auto& [j, c] : p.terms()) out.add_term(j, c * std::pow(R, kinetic_degree(j, p.s())));
  return out;
}

namespace {

struct EquivKey {
  double degree;
  double s;
  int d;
  auto operator<=>(const EquivKey&) const = default;
};

std::mutex equiv_mutex;
std::map<EquivKey, double> equiv_cache;

constexpr int kEquivLpSamples = 2000;

double compute_equivalence(double degree, const ScalingExponent& s, int d) {
  const auto basis = monomial_basis_upto(degree, s, d);
  const auto pts = unit_ball_samples(d, kEquivLpSamples, /*include_extremes=*/true);
  const Eigen::Index nb = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index np = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd A(2 * np, nb);
  for (Eigen::Index k = 0; k < np; ++k) {
    for (Eigen::Index j = 0; j < nb; ++j) {
      const double m = basis[j].eval(pts[k]);
      A(2 * k, j) = m;
      A(2 * k + 1, j) = -m;
    }
  }
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(2 * np);
  // The LP only sees finitely many points, so its value bounds the true ratio from above.
  double worst = 1.0;
  for (Eigen::Index j = 0; j < nb; ++j) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nb);
    c[j] = -1.0;
    const LpResult res = solve_lp(c, A, b);
    if (res.status != LpStatus::optimal) {
      throw std::runtime_error("equivalence constant LP failed: " + std::string(to_string(res.status)));
    }
    worst = std::max(worst, -res.objective);
  }
  return kEquivalenceSafety * worst;
}

}  // namespace

double equivalence_constant(double degree, const ScalingExponent& s, int d) {
  check_dim(d);
  if (degree < 0.0) throw std::invalid_argument("equivalence_constant: negative degree");
  const EquivKey key{degree, s.value(), d};
  {
    std::lock_guard<std::mutex> lock(equiv_mutex);
    auto it = equiv_cache.find(key);
    if (it != equiv_cache.end()) return it->second;
  }
  const double c = compute_equivalence(degree, s, d);
  std::lock_guard<std::mutex> lock(equiv_mutex);
  equiv_cache.emplace(key, c);
  return c;
}

CoefficientBoundReport coeff_bound_from_sup(const KineticPolynomial& p, double r, double C0,
                                            double alpha) {
  if (!(r > 0.0)) throw std::invalid_argument("coeff_bound_from_sup: r must be positive");
  if (!(C0 >= 0.0)) throw std::invalid_argument("coeff_bound_from_sup: C0 must be nonnegative");
  const auto& s = p.s();
  CoefficientBoundReport rep{};
  const double limit = C0 * std::pow(r, alpha);
  for (const auto& z : unit_ball_samples(p.d(), 20000, true)) {
    rep.sampled_sup = std::max(rep.sampled_sup, std::abs(p.eval(scale(r, z, s))));
  }
  if (rep.sampled_sup > limit * (1.0 + 1e-12) + 1e-300) {
    std::ostringstream os;
    os << "coeff_bound_from_sup: sampled sup " << rep.sampled_sup << " exceeds C0 r^alpha = " << limit;
    throw std::invalid_argument(os.str());
  }
  rep.equivalence_constant = equivalence_constant(p.degree(), s, p.d());
  rep.all_within = true;
  for (const auto& [j, c] : p.terms()) {
    const double bound = rep.equivalence_constant * C0 * std::pow(r, alpha - kinetic_degree(j, s));
    const bool ok = std::abs(c) <= bound;
    rep.terms.push_back({j, c, bound, ok});
    rep.all_within = rep.all_within && ok;
  }
  return rep;
}

std::string to_json(const KineticPolynomial& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [j, c] : p.terms()) {
    nlohmann::json e;
    e["jt"] = j.jt;
    e["jx"] = std::vector<int>(j.jx.begin(), j.jx.begin() + j.d);
    e["jv"] = std::vector<int>(j.jv.begin(), j.jv.begin() + j.d);
    e["c"] = c;
    arr.push_back(e);
  }
  return arr.dump();
}

KineticPolynomial polynomial_from_json(const std::string& text, ScalingExponent s, int d) {
  const auto arr = nlohmann::json::parse(text);
  if (!arr.is_array()) throw std::invalid_argument("polynomial JSON must be an array of terms");
  KineticPolynomial p(s, d);
  for (const auto& e : arr) {
    std::array<int, kMaxDim> jx{}, jv{};
    const auto vx = e.value("jx", std::vector<int>{});
    const auto vv = e.value("jv", std::vector<int>{});
    if (static_cast<int>(vx.size()) > d || static_cast<int>(vv.size()) > d) {
      throw std::invalid_argument("polynomial term has more components than d");
    }
    std::copy(vx.begin(), vx.end(), jx.begin());
    std::copy(vv.begin(), vv.end(), jv.begin());
    p.add_term(MultiIndex(e.value("jt", 0), jx, jv, d), e.at("c").get<double>());
  }
  return p;
}

}  // namespace kinetic
