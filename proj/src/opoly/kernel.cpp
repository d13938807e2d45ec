#include <algorithm>
#include <cmath>

#include "outpost/opoly.hpp"

namespace outpost {

using mp::Complex;
using mp::Real;

KernelEvaluator::KernelEvaluator(const Model& model, OrthoBasis basis)
    : model_(model), basis_(std::move(basis)), radial_(basis_.diagonal) {}

KernelEvaluator KernelEvaluator::build(const Model& model, int n, const MomentOptions& opts) {
  return KernelEvaluator(model, build_basis(model, n, opts));
}

ScaledVector KernelEvaluator::wave_vector(cplx z, double W) const {
  const int n = basis_.n;
  ScaledVector out;
  out.mant.assign(n, 0.0);
  if (!std::isfinite(W)) return out;
  if (radial_) {
    const double lz = std::log(std::abs(z));
    const double arg = std::arg(z);
    std::vector<double> lm(n);
    double mx = -kInf;
    for (int j = 0; j < n; ++j) {
      lm[j] = j == 0 ? basis_.log_gamma[0] : basis_.log_gamma[j] + j * lz;
      mx = std::max(mx, lm[j]);
    }
    for (int j = 0; j < n; ++j) out.mant[j] = std::polar(std::exp(lm[j] - mx), j * arg);
    out.log_scale = mx - 0.5 * n * W;
    return out;
  }
  mp::PrecisionScope ps(basis_.precision_bits);
  Real t1, t2;
  const cplx zs = z / basis_.scale;
  const Complex zeta(zs);
  std::vector<Complex> pw(n);
  pw[0] = Complex(Real(1), Real(0));
  for (int i = 1; i < n; ++i) pw[i] = pw[i - 1] * zeta;
  std::vector<Complex> v(n);
  Real mx = 0;
  for (int k = 0; k < n; ++k) {
    Complex acc;
    for (int i = 0; i <= k; ++i) {
      const Complex& c = basis_.coef[static_cast<size_t>(k) * n + i];
      // acc += c * pw_i
      Complex prod = c * pw[i];
      acc += prod;
    }
    v[k] = acc;
    Real nv = mp::norm(acc);
    if (nv > mx) mx = nv;
  }
  if (!(mx > 0)) return out;
  const Real ls = log(mx) / 2;
  const Real inv = exp(-ls);
  for (int k = 0; k < n; ++k) out.mant[k] = (v[k] * inv).to_double();
  out.log_scale = static_cast<double>(ls) - 0.5 * n * W;
  return out;
}

cplx dot_conj(const ScaledVector& a, const ScaledVector& b, double* log_scale) {
  cplx s = 0.0;
  for (size_t j = 0; j < a.mant.size(); ++j) s += a.mant[j] * std::conj(b.mant[j]);
  if (log_scale) *log_scale = a.log_scale + b.log_scale;
  return s;
}

std::vector<cplx> KernelEvaluator::wavefunctions(cplx z) const {
  ScaledVector v = wave_vector(z, model_.Q(z));
  const double s = std::exp(v.log_scale);
  for (auto& x : v.mant) x *= s;
  return v.mant;
}

cplx KernelEvaluator::wavefunction(int j, cplx z) const {
  require(j >= 0 && j < basis_.n, ErrorCode::InvalidParameter, "index out of range");
  return wavefunctions(z)[j];
}

cplx KernelEvaluator::weighted_kernel(cplx z, double Wz, cplx w, double Ww) const {
  if (!std::isfinite(Wz) || !std::isfinite(Ww)) return 0.0;
  ScaledVector a = wave_vector(z, Wz);
  ScaledVector b = z == w && Wz == Ww ? a : wave_vector(w, Ww);
  double ls = 0.0;
  cplx s = dot_conj(a, b, &ls);
  return s * std::exp(ls);
}

double KernelEvaluator::log_abs_weighted_kernel(cplx z, double Wz, cplx w, double Ww) const {
  if (!std::isfinite(Wz) || !std::isfinite(Ww)) return -kInf;
  ScaledVector a = wave_vector(z, Wz);
  ScaledVector b = z == w && Wz == Ww ? a : wave_vector(w, Ww);
  double ls = 0.0;
  cplx s = dot_conj(a, b, &ls);
  return std::log(std::abs(s)) + ls;
}

cplx KernelEvaluator::kernel(cplx z, cplx w) const { return weighted_kernel(z, model_.Q(z), w, model_.Q(w)); }

double KernelEvaluator::diagonal(cplx z) const { return kernel(z, z).real(); }

double KernelEvaluator::trace(int level) const {
  MomentOptions o;
  o.scheme = basis_.scheme;
  o.precision_bits = basis_.precision_bits;
  o.max_precision_bits = std::max(o.max_precision_bits, basis_.precision_bits);
  o.n_max = basis_.n;
  o.ginibre_radius = basis_.cutoff_radius;
  o.rule_shift = 7 + level;
  MomentMatrix M = compute_moments(model_, basis_.n, o);
  const int n = basis_.n;
  mp::PrecisionScope ps(basis_.precision_bits);
  Real total = 0;
  if (basis_.diagonal) {
    for (int k = 0; k < n; ++k) total += basis_.lead[k] * basis_.lead[k] * M.entry(k, k).re;
    return static_cast<double>(total);
  }
  Real t1, t2;
  for (int k = 0; k < n; ++k) {
    // q_k^* M q_k with q_k the coefficient row
    const Complex* c = &basis_.coef[static_cast<size_t>(k) * n];
    for (int i = 0; i <= k; ++i) {
      Complex acc;
      for (int j = 0; j <= k; ++j) mp::fma_conj(acc, M.full[static_cast<size_t>(i) * n + j], c[j], t1, t2);
      // Re(c_i * acc)
      total += c[i].re * acc.re - c[i].im * acc.im;
    }
  }
  return static_cast<double>(total);
}

double annulus_mass(const KernelEvaluator& K, double u0, double u1, int panels, int n_theta) {
  const Model& m = K.model();
  const auto& map = m.frame().map();
  require(u0 < u1 && u0 > map.inner_radius(), ErrorCode::InvalidParameter, "annulus must lie in the exterior chart");
  if (n_theta <= 0) n_theta = map.is_radial() ? 1 : 2 * K.n() + 64;
  const auto& gl = mp::gauss_legendre_d(24);
  // split at the edges of the regions of K so the integrand is smooth per panel
  std::vector<double> breaks{u0, u1};
  const double w = m.width(), R = m.frame().ratio();
  for (double b : {1.0, 1.0 + w, R * (1.0 - w), R * (1.0 + w)})
    if (b > u0 && b < u1) breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double h = (breaks[s + 1] - breaks[s]) / panels;
    for (int p = 0; p < panels; ++p)
      for (size_t k = 0; k < gl.nodes.size(); ++k) {
        const double u = breaks[s] + h * (p + 0.5 * (gl.nodes[k] + 1.0));
        double ring = 0.0;
        for (int t = 0; t < n_theta; ++t) {
          const cplx wv = std::polar(u, 2 * kPi * (t + 0.5) / n_theta);
          const cplx z = map.f(wv);
          ring += K.diagonal(z) * std::norm(map.df(wv));
        }
        // dA = d^2z / pi, d^2z = |f'|^2 u du dtheta
        total += 0.5 * h * gl.weights[k] * u * ring * (2.0 / n_theta);
      }
  }
  return total;
}

}  // namespace outpost
