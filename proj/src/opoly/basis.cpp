#include <cmath>

#include "outpost/opoly.hpp"

namespace outpost {

using mp::Complex;
using mp::Real;

namespace {

// a += b * c
void fma_plain(Complex& a, const Complex& b, const Complex& c, Real& t1, Real& t2) {
  mpfr_mul(t1.backend().data(), b.re.backend().data(), c.re.backend().data(), MPFR_RNDN);
  mpfr_mul(t2.backend().data(), b.im.backend().data(), c.im.backend().data(), MPFR_RNDN);
  mpfr_sub(t1.backend().data(), t1.backend().data(), t2.backend().data(), MPFR_RNDN);
  mpfr_add(a.re.backend().data(), a.re.backend().data(), t1.backend().data(), MPFR_RNDN);
  mpfr_mul(t1.backend().data(), b.re.backend().data(), c.im.backend().data(), MPFR_RNDN);
  mpfr_mul(t2.backend().data(), b.im.backend().data(), c.re.backend().data(), MPFR_RNDN);
  mpfr_add(t1.backend().data(), t1.backend().data(), t2.backend().data(), MPFR_RNDN);
  mpfr_add(a.im.backend().data(), a.im.backend().data(), t1.backend().data(), MPFR_RNDN);
}

size_t at(int n, int i, int j) { return static_cast<size_t>(i) * n + j; }

}  // namespace

Complex OrthoBasis::coefficient(int k, int i) const {
  if (diagonal) return i == k ? Complex(lead[k], Real(0)) : Complex();
  return i <= k ? coef[at(n, k, i)] : Complex();
}

OrthoBasis orthonormalize(const MomentMatrix& M) {
  const int n = M.n;
  OrthoBasis B;
  B.n = n;
  B.precision_bits = M.precision_bits;
  B.scale = M.scale;
  B.diagonal = M.diagonal;
  B.scheme = M.scheme;
  B.cutoff_radius = M.cutoff_radius;
  mp::PrecisionScope ps(M.precision_bits);
  B.lead.resize(n);
  B.log_gamma.resize(n);
  const double log_rho = std::log(M.scale);
  if (M.diagonal) {
    for (int k = 0; k < n; ++k) {
      if (!(M.diag[k] > 0)) fail(ErrorCode::NotPositiveDefinite, "nonpositive diagonal moment");
      B.lead[k] = 1 / sqrt(M.diag[k]);
      B.log_gamma[k] = static_cast<double>(log(B.lead[k])) - k * log_rho;
    }
    return B;
  }
  // M = L L^*, then coef = L^{-1}
  std::vector<Complex> L(static_cast<size_t>(n) * n);
  Real t1, t2;
  for (int j = 0; j < n; ++j) {
    Real d = M.full[at(n, j, j)].re;
    for (int m = 0; m < j; ++m) d -= mp::norm(L[at(n, j, m)]);
    if (!(d > 0)) fail(ErrorCode::NotPositiveDefinite, "Cholesky pivot " + std::to_string(j) + " is not positive");
    const Real ljj = sqrt(d);
    L[at(n, j, j)] = Complex(ljj, Real(0));
    const Real inv = 1 / ljj;
    for (int i = j + 1; i < n; ++i) {
      Complex s = M.full[at(n, i, j)];
      Complex acc;
      for (int m = 0; m < j; ++m) mp::fma_conj(acc, L[at(n, i, m)], L[at(n, j, m)], t1, t2);
      s -= acc;
      L[at(n, i, j)] = s * inv;
    }
  }
  B.coef.assign(static_cast<size_t>(n) * n, Complex());
  for (int k = 0; k < n; ++k) {
    const Real inv = 1 / L[at(n, k, k)].re;
    B.coef[at(n, k, k)] = Complex(inv, Real(0));
    for (int i = 0; i < k; ++i) {
      Complex acc;
      for (int m = i; m < k; ++m) fma_plain(acc, L[at(n, k, m)], B.coef[at(n, m, i)], t1, t2);
      B.coef[at(n, k, i)] = acc * Real(-inv);
    }
    B.lead[k] = inv;
    B.log_gamma[k] = static_cast<double>(log(inv)) - k * log_rho;
  }
  return B;
}

OrthoBasis build_basis(const Model& model, int n, const MomentOptions& opts, MomentMatrix* moments) {
  MomentOptions o = opts;
  if (o.precision_bits <= 0) o.precision_bits = precision_for(model, n, o.guard_bits);
  for (;;) {
    if (o.precision_bits > o.max_precision_bits)
      fail(ErrorCode::PrecisionBudgetExceeded, "Cholesky still fails at " + std::to_string(o.precision_bits) + " bits");
    MomentMatrix M = compute_moments(model, n, o);
    try {
      OrthoBasis B = orthonormalize(M);
      // a factorization that went through but lost orthogonality is also a precision failure
      if (orthogonality_residual(B, M) <= 1e-10) {
        if (moments) *moments = std::move(M);
        return B;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotPositiveDefinite) throw;
    }
    o.precision_bits = (3 * o.precision_bits + 1) / 2;
  }
}

double orthogonality_residual(const OrthoBasis& B, const MomentMatrix& M) {
  require(B.n == M.n, ErrorCode::InvalidParameter, "basis and moments differ in n");
  const int n = B.n;
  mp::PrecisionScope ps(std::max(B.precision_bits, M.precision_bits));
  double worst = 0.0;
  if (B.diagonal) {
    for (int k = 0; k < n; ++k) {
      Real g = B.lead[k] * B.lead[k] * M.entry(k, k).re - 1;
      worst = std::max(worst, static_cast<double>(abs(g)));
    }
    if (!M.diagonal) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
          Complex e = M.entry(i, j) * Real(B.lead[i] * B.lead[j]);
          worst = std::max(worst, std::sqrt(static_cast<double>(mp::norm(e))));
        }
    }
    return worst;
  }
  // T = M C^*, G = C T
  Real t1, t2;
  std::vector<Complex> T(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      Complex acc;
      for (int j = 0; j <= l; ++j) mp::fma_conj(acc, M.entry(i, j), B.coef[at(n, l, j)], t1, t2);
      T[at(n, i, l)] = acc;
    }
  for (int k = 0; k < n; ++k)
    for (int l = 0; l <= k; ++l) {
      Complex acc;
      for (int i = 0; i <= k; ++i) fma_plain(acc, B.coef[at(n, k, i)], T[at(n, i, l)], t1, t2);
      if (k == l) acc.re -= 1;
      worst = std::max(worst, std::sqrt(static_cast<double>(mp::norm(acc))));
    }
  return worst;
}

std::vector<std::complex<double>> monic_coefficients(const OrthoBasis& B, int k) {
  require(k >= 0 && k < B.n, ErrorCode::InvalidParameter, "degree out of range");
  mp::PrecisionScope ps(B.precision_bits);
  std::vector<std::complex<double>> out(k + 1, 0.0);
  out[k] = 1.0;
  if (B.diagonal) return out;
  const Real inv = 1 / B.lead[k];
  for (int i = 0; i < k; ++i) {
    // coef(k,i) rho^{k-i} / lead_k
    Real s = inv * pow(Real(B.scale), k - i);
    out[i] = (B.coef[at(B.n, k, i)] * s).to_double();
  }
  return out;
}

}  // namespace outpost
