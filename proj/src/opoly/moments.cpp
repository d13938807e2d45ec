#include <algorithm>
#include <cmath>

#include "outpost/opoly.hpp"

namespace outpost {

using mp::Complex;
using mp::Real;

const char* moment_scheme_name(MomentScheme s) {
  switch (s) {
    case MomentScheme::Auto: return "auto";
    case MomentScheme::Radial1D: return "radial_1d";
    case MomentScheme::Polar2D: return "polar_2d";
  }
  return "?";
}

Complex MomentMatrix::entry(int i, int j) const {
  if (diagonal) return i == j ? Complex(diag[i], Real(0)) : Complex();
  return full[static_cast<size_t>(i) * n + j];
}

double MomentMatrix::log_diag(int i) const {
  mp::PrecisionScope ps(precision_bits);
  const Real& v = diagonal ? diag[i] : full[static_cast<size_t>(i) * n + i].re;
  return static_cast<double>(log(v));
}

namespace {

void mul_into(Complex& out, const Complex& a, const Complex& b, Real& t1, Real& t2) {
  mpfr_mul(t1.backend().data(), a.re.backend().data(), b.re.backend().data(), MPFR_RNDN);
  mpfr_mul(t2.backend().data(), a.im.backend().data(), b.im.backend().data(), MPFR_RNDN);
  mpfr_sub(out.re.backend().data(), t1.backend().data(), t2.backend().data(), MPFR_RNDN);
  mpfr_mul(t1.backend().data(), a.re.backend().data(), b.im.backend().data(), MPFR_RNDN);
  mpfr_mul(t2.backend().data(), a.im.backend().data(), b.re.backend().data(), MPFR_RNDN);
  mpfr_add(out.im.backend().data(), t1.backend().data(), t2.backend().data(), MPFR_RNDN);
}

double dynamic_range(const Model& model) {
  if (model.kind() == ModelKind::Ginibre) return 1.0;
  double qmin = kInf, qmax = -kInf;
  for (const Patch& p : model.patches()) {
    for (int a = 0; a <= 64; ++a) {
      const double u = p.u0 + (p.u1 - p.u0) * a / 64.0;
      for (int b = 0; b < 256; ++b) {
        PatchPoint pp = model.patch_point(p, u, 2 * kPi * b / 256.0);
        qmin = std::min(qmin, pp.Q);
        qmax = std::max(qmax, model.obstacle(pp.z));
      }
    }
  }
  return qmax - qmin;
}

double ginibre_cutoff(const Model& model, int n, int bits, double given) {
  if (given > 0) return given;
  const double A = model.droplet_laplacian();
  return 1.0 / std::sqrt(A) + std::sqrt((bits * std::log(2.0) + 20.0) / (n * A));
}

int resolve_bits(const Model& model, int n, const MomentOptions& opts, double& range) {
  range = dynamic_range(model);
  int bits = opts.precision_bits > 0 ? opts.precision_bits
                                     : static_cast<int>(std::ceil(n * range / std::log(2.0))) + opts.guard_bits;
  if (bits > opts.max_precision_bits)
    fail(ErrorCode::PrecisionBudgetExceeded, "needs " + std::to_string(bits) + " bits");
  return bits;
}

// Radial moments: M_jj = 2 int r (r/rho)^{2j} e^{-nQ(r)} dr over the radial intervals of K.
std::vector<Real> radial_pass(const Model& model, int n, double rho,
                              const std::vector<std::pair<double, double>>& intervals, int panels, unsigned m) {
  const auto& rule = mp::gauss_legendre(m);
  std::vector<Real> sums(n, Real(0));
  Real t1, t2, term, s, base;
  const Real rr = Real(1) / Real(rho);
  for (auto [a, b] : intervals) {
    const Real h = (Real(b) - Real(a)) / panels;
    for (int p = 0; p < panels; ++p) {
      const Real lo = Real(a) + h * p;
      for (unsigned k = 0; k < m; ++k) {
        Real r = lo + h * (rule.nodes[k] + 1) / 2;
        bool finite = true;
        Real Qr = model.radial_Q(r, finite);
        if (!finite) continue;
        base = h * rule.weights[k] * r * exp(-n * Qr);  // (h/2) * w * 2r
        s = r * rr;
        s *= s;
        term = base;
        for (int j = 0; j < n; ++j) {
          sums[j] += term;
          term *= s;
        }
      }
    }
  }
  return sums;
}

// Composite Gauss-Legendre, panels doubled until successive passes agree to tol (relative).
std::vector<Real> adaptive_radial(const Model& model, int n, double rho,
                                  const std::vector<std::pair<double, double>>& intervals, double tol, int shift,
                                  double& err) {
  const unsigned m = 40 + shift;
  int panels = 4 + shift % 3;
  std::vector<Real> prev = radial_pass(model, n, rho, intervals, panels, m);
  while (panels <= 1024) {
    panels *= 2;
    std::vector<Real> cur = radial_pass(model, n, rho, intervals, panels, m);
    err = 0.0;
    for (int j = 0; j < n; ++j)
      if (cur[j] > 0) err = std::max(err, static_cast<double>(abs(cur[j] - prev[j]) / cur[j]));
    prev = std::move(cur);
    if (err < tol) return prev;
  }
  fail(ErrorCode::QuadratureNotConverged, "radial moments did not settle");
}

MomentMatrix radial_moments(const Model& model, int n, int bits, const MomentOptions& opts) {
  MomentMatrix M;
  M.n = n;
  M.precision_bits = bits;
  M.scheme = MomentScheme::Radial1D;
  M.diagonal = true;
  M.scale = model.kind() == ModelKind::Ginibre ? model.frame().r1() : model.frame().r2();
  mp::PrecisionScope ps(bits);
  const double r_max = model.kind() == ModelKind::Ginibre ? ginibre_cutoff(model, n, bits, opts.ginibre_radius) : 0.0;
  M.cutoff_radius = r_max;
  const double tol = opts.rel_tol > 0 ? opts.rel_tol : std::ldexp(1.0, -80);
  M.diag = adaptive_radial(model, n, M.scale, model.radial_intervals(r_max), tol, opts.rule_shift, M.error_estimate);
  return M;
}

struct Node {
  cplx zeta;    // z / rho
  double logw;  // log of the quadrature weight times e^{-nQ}
};

std::vector<Node> polar_nodes(const Model& model, int n, double rho, int level, int shift) {
  const unsigned m = 24 + shift;
  const auto& rule = mp::gauss_legendre_d(m);
  const int n_theta = (2 * n + 64 + 2 * shift) << level;
  const double log_dtheta = std::log(2 * kPi / n_theta);
  std::vector<Node> nodes;
  for (const Patch& p : model.patches()) {
    std::vector<double> breaks;
    if (p.shape == Patch::Shape::Star)
      breaks = {0.0, 0.5, 0.8, 1.0};
    else
      breaks = {p.u0, 0.5 * (p.u0 + p.u1), p.u1};
    for (size_t b = 0; b + 1 < breaks.size(); ++b) {
      const int sub = 1 << level;
      const double h = (breaks[b + 1] - breaks[b]) / sub;
      for (int s = 0; s < sub; ++s) {
        const double lo = breaks[b] + h * s;
        for (unsigned k = 0; k < m; ++k) {
          const double u = lo + 0.5 * h * (rule.nodes[k] + 1.0);
          const double lw = std::log(0.5 * h * rule.weights[k]) + log_dtheta;
          for (int t = 0; t < n_theta; ++t) {
            PatchPoint pp = model.patch_point(p, u, 2 * kPi * (t + 0.5) / n_theta);
            if (!(pp.jacobian > 0))
              fail(ErrorCode::InvalidGeometry, "patch parametrization of K is not orientation preserving");
            if (!std::isfinite(pp.Q)) fail(ErrorCode::InvalidGeometry, "Q is infinite on a patch of K");
            nodes.push_back({pp.z / rho, lw + std::log(pp.jacobian) - n * pp.Q});
          }
        }
      }
    }
  }
  return nodes;
}

// Lower triangle of the Gram matrix of the discrete measure given by the nodes.
std::vector<Complex> polar_pass(const std::vector<Node>& nodes, int n) {
  std::vector<Complex> M(static_cast<size_t>(n) * n);
  std::vector<Complex> a(n);
  Real t1, t2;
  Complex zeta;
  for (const Node& nd : nodes) {
    zeta.re = nd.zeta.real();
    zeta.im = nd.zeta.imag();
    a[0].re = exp(Real(0.5 * nd.logw));
    a[0].im = 0;
    for (int i = 1; i < n; ++i) mul_into(a[i], a[i - 1], zeta, t1, t2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) mp::fma_conj(M[static_cast<size_t>(i) * n + j], a[i], a[j], t1, t2);
  }
  return M;
}

MomentMatrix polar_moments(const Model& model, int n, int bits, const MomentOptions& opts) {
  MomentMatrix M;
  M.n = n;
  M.precision_bits = bits;
  M.scheme = MomentScheme::Polar2D;
  M.diagonal = false;
  M.scale = model.frame().r2();
  // rounding in the node sums sets a floor under the attainable agreement
  const double tol = std::max(opts.rel_tol > 0 ? opts.rel_tol : 1e-12, std::ldexp(1e4, -bits));
  mp::PrecisionScope ps(bits);
  std::vector<Complex> prev = polar_pass(polar_nodes(model, n, M.scale, 0, opts.rule_shift), n);
  for (int level = 1; level <= 3; ++level) {
    std::vector<Complex> cur = polar_pass(polar_nodes(model, n, M.scale, level, opts.rule_shift), n);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        const size_t ij = static_cast<size_t>(i) * n + j;
        Real d = sqrt(mp::norm(cur[ij] - prev[ij]) / (cur[static_cast<size_t>(i) * n + i].re * cur[static_cast<size_t>(j) * n + j].re));
        err = std::max(err, static_cast<double>(d));
      }
    prev = std::move(cur);
    if (err < tol) {
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          prev[static_cast<size_t>(i) * n + j] = mp::conj(prev[static_cast<size_t>(j) * n + i]);
      M.full = std::move(prev);
      M.error_estimate = err;
      return M;
    }
  }
  fail(ErrorCode::QuadratureNotConverged, "polar moments did not settle after three refinements");
}

}  // namespace

std::vector<double> radial_annulus_shares(const Model& model, int n, double a, double b, const MomentOptions& opts) {
  require(model.is_radial(), ErrorCode::InvalidParameter, "annulus shares need a rotation-invariant model");
  require(0 <= a && a < b, ErrorCode::InvalidParameter, "need 0 <= a < b");
  MomentMatrix M = compute_moments(model, n, opts);
  mp::PrecisionScope ps(M.precision_bits);
  std::vector<std::pair<double, double>> clipped;
  for (auto [lo, hi] : model.radial_intervals(M.cutoff_radius)) {
    const double l = std::max(lo, a), h = std::min(hi, b);
    if (l < h) clipped.push_back({l, h});
  }
  std::vector<double> out(n, 0.0);
  if (clipped.empty()) return out;
  const double tol = opts.rel_tol > 0 ? opts.rel_tol : std::ldexp(1.0, -80);
  double err = 0.0;
  std::vector<Real> part = adaptive_radial(model, n, M.scale, clipped, tol, opts.rule_shift, err);
  for (int j = 0; j < n; ++j) out[j] = static_cast<double>(part[j] / M.diag[j]);
  return out;
}

int precision_for(const Model& model, int n, int guard_bits) {
  return static_cast<int>(std::ceil(n * dynamic_range(model) / std::log(2.0))) + guard_bits;
}

MomentMatrix compute_moments(const Model& model, int n, const MomentOptions& opts) {
  require(n >= 1, ErrorCode::InvalidParameter, "n must be positive");
  MomentScheme scheme = opts.scheme;
  if (scheme == MomentScheme::Auto) scheme = model.is_radial() ? MomentScheme::Radial1D : MomentScheme::Polar2D;
  if (scheme == MomentScheme::Radial1D && !model.is_radial())
    fail(ErrorCode::InvalidParameter, "radial_1d needs a rotation-invariant model");
  if (scheme == MomentScheme::Polar2D && model.kind() == ModelKind::Ginibre)
    fail(ErrorCode::InvalidParameter, "polar_2d has no patches for the Ginibre potential");
  const int n_max = opts.n_max > 0 ? opts.n_max : (scheme == MomentScheme::Radial1D ? 128 : 48);
  require(n <= n_max, ErrorCode::PreconditionViolated, "n = " + std::to_string(n) + " exceeds n_max");
  double range = 0.0;
  const int bits = resolve_bits(model, n, opts, range);
  MomentMatrix M = scheme == MomentScheme::Radial1D ? radial_moments(model, n, bits, opts)
                                                    : polar_moments(model, n, bits, opts);
  M.range = range;
  return M;
}

}  // namespace outpost
