#include "btq/jets.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace btq {

// Shared index tables per (vars, order): the list of exponent tuples with total
// degree <= order in graded order, a mixed-radix lookup from tuple to position,
// and per-term total degrees for truncation in products.
struct JetTable {
  int vars = 0;
  int order = 0;
  std::vector<std::vector<int>> exponents;
  std::vector<int> degree;
  std::vector<int> lookup; // mixed-radix (order+1)^vars -> term index or -1
  std::vector<double> factorial_product;

  int radix_index(std::span<const int> e) const {
    int idx = 0;
    for (int i = 0; i < vars; ++i) idx = idx * (order + 1) + e[i];
    return idx;
  }

  static const JetTable& get(int vars, int order);
};

namespace {

void enumerate(int vars, int order, std::vector<int>& cur, int remaining, JetTable& t) {
  if (static_cast<int>(cur.size()) == vars) {
    t.exponents.push_back(cur);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    cur.push_back(e);
    enumerate(vars, order, cur, remaining - e, t);
    cur.pop_back();
  }
}

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

} // namespace

const JetTable& JetTable::get(int vars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, JetTable> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(vars, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  if (vars < 1 || vars > 4) fail(ErrorKind::unsupported_order, "jet variable count must be 1..4");
  if (order < 0 || order > Jet::kMaxOrder)
    fail(ErrorKind::unsupported_order,
         "jet order " + std::to_string(order) + " exceeds maximum " + std::to_string(Jet::kMaxOrder));

  JetTable t;
  t.vars = vars;
  t.order = order;
  std::vector<int> cur;
  // graded order: enumerate by total degree so truncation is a prefix
  std::vector<std::vector<int>> all;
  {
    JetTable scratch;
    scratch.vars = vars;
    scratch.order = order;
    enumerate(vars, order, cur, order, scratch);
    all = std::move(scratch.exponents);
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    int da = 0, db = 0;
    for (int x : a) da += x;
    for (int x : b) db += x;
    return da < db;
  });
  t.exponents = std::move(all);
  int radix_size = 1;
  for (int i = 0; i < vars; ++i) radix_size *= (order + 1);
  t.lookup.assign(radix_size, -1);
  for (size_t i = 0; i < t.exponents.size(); ++i) {
    const auto& e = t.exponents[i];
    int deg = 0;
    for (int x : e) deg += x;
    t.degree.push_back(deg);
    t.lookup[t.radix_index(e)] = static_cast<int>(i);
    double fp = 1;
    for (int x : e) fp *= factorial(x);
    t.factorial_product.push_back(fp);
  }
  auto [pos, ok] = cache.emplace(key, std::move(t));
  (void)ok;
  return pos->second;
}

Jet::Jet(int vars, int order) : vars_(vars), order_(order) {
  const auto& t = JetTable::get(vars, order);
  coeff_.assign(t.exponents.size(), cplx(0));
}

Jet Jet::constant(int vars, int order, cplx value) {
  Jet j(vars, order);
  j.coeff_[0] = value;
  return j;
}

Jet Jet::variable(int vars, int order, int slot, cplx base) {
  if (slot < 0 || slot >= vars) fail(ErrorKind::domain, "jet variable slot out of range");
  Jet j(vars, order);
  j.coeff_[0] = base;
  if (order >= 1) {
    const auto& t = JetTable::get(vars, order);
    std::vector<int> e(vars, 0);
    e[slot] = 1;
    j.coeff_[t.lookup[t.radix_index(e)]] = cplx(1);
  }
  return j;
}

void Jet::require_compatible(const Jet& rhs) const {
  if (vars_ != rhs.vars_ || order_ != rhs.order_)
    fail(ErrorKind::convention_violation, "jet arithmetic on incompatible shapes");
}

cplx Jet::coeff(std::span<const int> powers) const {
  const auto& t = JetTable::get(vars_, order_);
  int deg = 0;
  for (int p : powers) deg += p;
  if (static_cast<int>(powers.size()) != vars_ || deg > order_)
    fail(ErrorKind::unsupported_order, "requested jet coefficient beyond stored order " + std::to_string(order_));
  int idx = t.lookup[t.radix_index(powers)];
  return coeff_[idx];
}

cplx Jet::partial(std::span<const int> powers) const {
  const auto& t = JetTable::get(vars_, order_);
  int deg = 0;
  for (int p : powers) deg += p;
  if (static_cast<int>(powers.size()) != vars_ || deg > order_)
    fail(ErrorKind::unsupported_order, "requested jet partial beyond stored order " + std::to_string(order_));
  int idx = t.lookup[t.radix_index(powers)];
  return coeff_[idx] * t.factorial_product[idx];
}

cplx Jet::coeff2(int p0, int p1) const {
  const int e[2] = {p0, p1};
  return coeff(std::span<const int>(e, 2));
}

cplx Jet::partial2(int p0, int p1) const {
  const int e[2] = {p0, p1};
  return partial(std::span<const int>(e, 2));
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (auto& c : r.coeff_) c = -c;
  return r;
}

Jet Jet::operator+(const Jet& rhs) const {
  require_compatible(rhs);
  Jet r = *this;
  for (size_t i = 0; i < coeff_.size(); ++i) r.coeff_[i] += rhs.coeff_[i];
  return r;
}

Jet Jet::operator-(const Jet& rhs) const {
  require_compatible(rhs);
  Jet r = *this;
  for (size_t i = 0; i < coeff_.size(); ++i) r.coeff_[i] -= rhs.coeff_[i];
  return r;
}

Jet Jet::operator*(const Jet& rhs) const {
  require_compatible(rhs);
  const auto& t = JetTable::get(vars_, order_);
  Jet r(vars_, order_);
  const int n = terms();
  for (int i = 0; i < n; ++i) {
    if (coeff_[i] == cplx(0)) continue;
    const int di = t.degree[i];
    for (int j = 0; j < n; ++j) {
      if (t.degree[j] + di > order_) continue;
      if (rhs.coeff_[j] == cplx(0)) continue;
      std::vector<int> e(vars_);
      for (int v = 0; v < vars_; ++v) e[v] = t.exponents[i][v] + t.exponents[j][v];
      r.coeff_[t.lookup[t.radix_index(e)]] += coeff_[i] * rhs.coeff_[j];
    }
  }
  return r;
}

Jet Jet::operator/(const Jet& rhs) const { return *this * inverse(rhs); }

Jet Jet::operator+(cplx s) const {
  Jet r = *this;
  r.coeff_[0] += s;
  return r;
}
Jet Jet::operator-(cplx s) const {
  Jet r = *this;
  r.coeff_[0] -= s;
  return r;
}
Jet Jet::operator*(cplx s) const {
  Jet r = *this;
  for (auto& c : r.coeff_) c *= s;
  return r;
}
Jet Jet::operator/(cplx s) const { return *this * (cplx(1) / s); }

Jet operator/(cplx s, const Jet& j) { return inverse(j) * s; }

Jet& Jet::operator+=(const Jet& rhs) {
  *this = *this + rhs;
  return *this;
}
Jet& Jet::operator*=(const Jet& rhs) {
  *this = *this * rhs;
  return *this;
}

Jet Jet::derivative(int slot) const {
  if (slot < 0 || slot >= vars_) fail(ErrorKind::domain, "jet derivative slot out of range");
  const auto& t = JetTable::get(vars_, order_);
  Jet r(vars_, order_);
  for (int i = 0; i < terms(); ++i) {
    int e_slot = t.exponents[i][slot];
    if (e_slot == 0) continue;
    std::vector<int> e = t.exponents[i];
    e[slot] -= 1;
    r.coeff_[t.lookup[t.radix_index(e)]] = coeff_[i] * double(e_slot);
  }
  return r;
}

Jet Jet::truncated(int new_order) const {
  if (new_order >= order_) return *this;
  const auto& told = JetTable::get(vars_, order_);
  const auto& tnew = JetTable::get(vars_, new_order);
  Jet r(vars_, new_order);
  for (int i = 0; i < terms(); ++i) {
    if (told.degree[i] > new_order) continue;
    r.coeff_[tnew.lookup[tnew.radix_index(told.exponents[i])]] = coeff_[i];
  }
  return r;
}

Jet Jet::evaluate(std::span<const Jet> args) const {
  if (static_cast<int>(args.size()) != vars_)
    fail(ErrorKind::domain, "jet evaluate: argument count mismatch");
  const int av = args[0].vars();
  const int ao = args[0].order();
  // powers of each argument up to the outer order
  std::vector<std::vector<Jet>> pw(vars_);
  for (int v = 0; v < vars_; ++v) {
    pw[v].resize(order_ + 1);
    pw[v][0] = Jet::constant(av, ao, cplx(1));
    for (int e = 1; e <= order_; ++e) pw[v][e] = pw[v][e - 1] * args[v];
  }
  const auto& t = JetTable::get(vars_, order_);
  Jet r(av, ao);
  for (int i = 0; i < terms(); ++i) {
    if (coeff_[i] == cplx(0)) continue;
    Jet term = Jet::constant(av, ao, coeff_[i]);
    for (int v = 0; v < vars_; ++v)
      if (t.exponents[i][v] > 0) term = term * pw[v][t.exponents[i][v]];
    r = r + term;
  }
  return r;
}

Jet Jet::pair_conjugate() const {
  if (vars_ != 2) fail(ErrorKind::domain, "pair_conjugate requires the (z, zbar) two-slot layout");
  const auto& t = JetTable::get(vars_, order_);
  Jet r(vars_, order_);
  for (int i = 0; i < terms(); ++i) {
    std::vector<int> e = {t.exponents[i][1], t.exponents[i][0]};
    r.coeff_[t.lookup[t.radix_index(e)]] = std::conj(coeff_[i]);
  }
  return r;
}

Jet Jet::apply_analytic(const Jet& u, std::span<const cplx> derivs_at_base) {
  if (static_cast<int>(derivs_at_base.size()) < u.order_ + 1)
    fail(ErrorKind::unsupported_order, "apply_analytic: need order+1 derivatives");
  Jet w = u;
  w.coeff_[0] = cplx(0); // nilpotent part
  Jet r = Jet::constant(u.vars_, u.order_, derivs_at_base[0]);
  Jet wk = Jet::constant(u.vars_, u.order_, cplx(1));
  double fact = 1;
  for (int m = 1; m <= u.order_; ++m) {
    wk = wk * w;
    fact *= m;
    r = r + wk * (derivs_at_base[m] / fact);
  }
  return r;
}

Jet exp(const Jet& u) {
  std::vector<cplx> d(u.order() + 1, std::exp(u.value()));
  return Jet::apply_analytic(u, d);
}

Jet log(const Jet& u) {
  cplx u0 = u.value();
  if (u0 == cplx(0)) fail(ErrorKind::domain, "log of jet with zero base value");
  std::vector<cplx> d(u.order() + 1);
  d[0] = std::log(u0);
  cplx p = cplx(1);
  for (int m = 1; m <= u.order(); ++m) {
    p /= u0;                                 // u0^{-m}
    double sign = (m % 2 == 0) ? -1.0 : 1.0; // (-1)^{m-1}
    d[m] = sign * factorial(m - 1) * p;
  }
  return Jet::apply_analytic(u, d);
}

Jet pow_real(const Jet& u, double a) {
  cplx u0 = u.value();
  if (u0 == cplx(0)) fail(ErrorKind::domain, "pow_real of jet with zero base value");
  // d[m] = a(a-1)..(a-m+1) u0^{a-m}
  std::vector<cplx> d(u.order() + 1);
  cplx base = std::pow(u0, a);
  double falling = 1;
  for (int m = 0; m <= u.order(); ++m) {
    d[m] = falling * base;
    base /= u0;
    falling *= (a - m);
  }
  return Jet::apply_analytic(u, d);
}

Jet sqrt(const Jet& u) { return pow_real(u, 0.5); }

Jet inverse(const Jet& u) {
  cplx u0 = u.value();
  if (u0 == cplx(0)) fail(ErrorKind::domain, "inverse of jet with zero base value");
  std::vector<cplx> d(u.order() + 1);
  cplx p = cplx(1) / u0;
  double fact = 1;
  for (int m = 0; m <= u.order(); ++m) {
    d[m] = fact * p; // m! (-1)^m u0^{-m-1}, sign folded below
    if (m % 2 == 1) d[m] = -d[m];
    fact *= (m + 1);
    p /= u0;
  }
  return Jet::apply_analytic(u, d);
}

} // namespace btq
