#include "outpost/mp.hpp"

#include <map>
#include <mutex>
#include <utility>

namespace outpost::mp {

void fma_conj(Complex& a, const Complex& b, const Complex& c, Real& t1, Real& t2) {
  // (b.re + i b.im)(c.re - i c.im)
  mpfr_mul(t1.backend().data(), b.re.backend().data(), c.re.backend().data(), MPFR_RNDN);
  mpfr_mul(t2.backend().data(), b.im.backend().data(), c.im.backend().data(), MPFR_RNDN);
  mpfr_add(t1.backend().data(), t1.backend().data(), t2.backend().data(), MPFR_RNDN);
  mpfr_add(a.re.backend().data(), a.re.backend().data(), t1.backend().data(), MPFR_RNDN);
  mpfr_mul(t1.backend().data(), b.im.backend().data(), c.re.backend().data(), MPFR_RNDN);
  mpfr_mul(t2.backend().data(), b.re.backend().data(), c.im.backend().data(), MPFR_RNDN);
  mpfr_sub(t1.backend().data(), t1.backend().data(), t2.backend().data(), MPFR_RNDN);
  mpfr_add(a.im.backend().data(), a.im.backend().data(), t1.backend().data(), MPFR_RNDN);
}

namespace {

template <class T, class Cos>
void legendre_rule(unsigned m, std::vector<T>& x, std::vector<T>& w, const T& eps, Cos cosine) {
  x.assign(m, T(0));
  w.assign(m, T(0));
  const T pi = boost::math::constants::pi<T>();
  for (unsigned i = 0; i < (m + 1) / 2; ++i) {
    T z = cosine(pi * (T(i) + T(0.75)) / (T(m) + T(0.5)));
    T dp = 0;
    for (int it = 0; it < 200; ++it) {
      T p0 = 1, p1 = z;
      for (unsigned k = 2; k <= m; ++k) {
        T p2 = ((2 * T(k) - 1) * z * p1 - (T(k) - 1) * p0) / T(k);
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1;
      dp = T(m) * (z * p1 - p0) / (z * z - 1);
      T dz = p1 / dp;
      z -= dz;
      if (abs(dz) < eps) break;
    }
    // recompute derivative at the converged node
    T p0 = 1, p1 = z;
    for (unsigned k = 2; k <= m; ++k) {
      T p2 = ((2 * T(k) - 1) * z * p1 - (T(k) - 1) * p0) / T(k);
      p0 = p1;
      p1 = p2;
    }
    if (m == 1) p0 = 1;
    dp = T(m) * (z * p1 - p0) / (z * z - 1);
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = w[m - 1 - i] = 2 / ((1 - z * z) * dp * dp);
  }
}

}  // namespace

const GaussRule& gauss_legendre(unsigned m) {
  static std::mutex mu;
  static std::map<std::pair<unsigned, unsigned>, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  const unsigned prec = Real::default_precision();
  auto key = std::make_pair(m, prec);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  GaussRule rule;
  Real eps = pow(Real(10), -static_cast<int>(prec) + 2);
  legendre_rule<Real>(m, rule.nodes, rule.weights, eps, [](const Real& v) { return Real(cos(v)); });
  return cache.emplace(key, std::move(rule)).first->second;
}

const GaussRuleD& gauss_legendre_d(unsigned m) {
  static std::mutex mu;
  static std::map<unsigned, GaussRuleD> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  std::vector<long double> x, w;
  legendre_rule<long double>(m, x, w, 1e-18L, [](long double v) { return std::cos(v); });
  GaussRuleD rule;
  for (unsigned i = 0; i < m; ++i) {
    rule.nodes.push_back(static_cast<double>(x[i]));
    rule.weights.push_back(static_cast<double>(w[i]));
  }
  return cache.emplace(m, std::move(rule)).first->second;
}

}  // namespace outpost::mp
