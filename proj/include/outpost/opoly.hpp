#pragma once

#include <vector>

#include "outpost/mp.hpp"
#include "outpost/potential.hpp"

namespace outpost {

enum class MomentScheme { Auto, Radial1D, Polar2D };

const char* moment_scheme_name(MomentScheme s);

struct MomentOptions {
  MomentScheme scheme = MomentScheme::Auto;
  int precision_bits = 0;  // 0: ceil(n * range / ln 2) + guard_bits
  int guard_bits = 96;
  int max_precision_bits = 1 << 14;
  int n_max = 0;           // 0: 128 for radial_1d, 48 for polar_2d
  double rel_tol = 0.0;    // 0: 2^-80 (radial_1d), 1e-12 (polar_2d)
  double ginibre_radius = 0.0;  // 0: chosen from the precision
  int rule_shift = 0;           // perturbs node counts; used for independent re-quadrature
};

// M_ij = integral of (z/rho)^i conj((z/rho)^j) e^{-nQ} dA over K, dA = d^2z / pi.
struct MomentMatrix {
  int n = 0;
  int precision_bits = 0;
  double scale = 1.0;  // rho
  MomentScheme scheme = MomentScheme::Radial1D;
  bool diagonal = false;
  std::vector<mp::Real> diag;     // diagonal case
  std::vector<mp::Complex> full;  // row-major n x n otherwise
  double error_estimate = 0.0;    // max |M_ij(fine) - M_ij(coarse)| / sqrt(M_ii M_jj)
  double range = 0.0;             // max Qcheck - min Q over K used for the precision budget
  double cutoff_radius = 0.0;     // Ginibre: moments are integrated over |z| <= cutoff_radius

  mp::Complex entry(int i, int j) const;
  double log_diag(int i) const;  // log M_ii
};

MomentMatrix compute_moments(const Model& model, int n, const MomentOptions& opts = {});
// Rotation-invariant models: p_j = share of the j-th moment carried by K intersected with a <= |z| <= b.
// The number of points in that annulus is the sum of independent Bernoulli(p_j).
std::vector<double> radial_annulus_shares(const Model& model, int n, double a, double b, const MomentOptions& opts = {});
// Precision from the dynamic range of e^{-nQ} over K.
int precision_for(const Model& model, int n, int guard_bits = 96);

// Orthonormal polynomials q_k = gamma_k p_k, p_k monic. In the scaled monomial basis
// (z/rho)^i, q_k = sum_{i<=k} coef(k, i) (z/rho)^i.
struct OrthoBasis {
  int n = 0;
  int precision_bits = 0;
  double scale = 1.0;
  bool diagonal = false;
  MomentScheme scheme = MomentScheme::Radial1D;
  double cutoff_radius = 0.0;
  std::vector<mp::Complex> coef;  // lower triangle, row-major n x n (general case)
  std::vector<mp::Real> lead;     // coef(k, k) = 1 / L_kk
  std::vector<double> log_gamma;  // log gamma_k = log lead_k - k log rho

  mp::Complex coefficient(int k, int i) const;
};

OrthoBasis orthonormalize(const MomentMatrix& M);
// Moments plus Cholesky, retrying at 1.5x precision on NotPositiveDefinite.
OrthoBasis build_basis(const Model& model, int n, const MomentOptions& opts = {}, MomentMatrix* moments = nullptr);
// max |<q_j, q_l> - delta_jl| recomputed from the moments.
double orthogonality_residual(const OrthoBasis& B, const MomentMatrix& M);
// Coefficients of the monic p_k in powers of z.
std::vector<std::complex<double>> monic_coefficients(const OrthoBasis& B, int k);

// Value v_j = mant_j * e^{log_scale}.
struct ScaledVector {
  std::vector<cplx> mant;
  double log_scale = 0.0;
};

class KernelEvaluator {
 public:
  KernelEvaluator(const Model& model, OrthoBasis basis);
  static KernelEvaluator build(const Model& model, int n, const MomentOptions& opts = {});

  int n() const { return basis_.n; }
  const Model& model() const { return model_; }
  const OrthoBasis& basis() const { return basis_; }
  bool radial_fast_path() const { return radial_; }

  // q_j(z) e^{-n W / 2} for all j < n.
  ScaledVector wave_vector(cplx z, double W) const;
  // e_{j,n}(z); zero where Q = +inf.
  std::vector<cplx> wavefunctions(cplx z) const;
  cplx wavefunction(int j, cplx z) const;
  cplx kernel(cplx z, cplx w) const;
  double diagonal(cplx z) const;
  // sum_j q_j(z) conj q_j(w) e^{-n (Wz + Ww) / 2}; polynomial kernel with arbitrary weights.
  cplx weighted_kernel(cplx z, double Wz, cplx w, double Ww) const;
  double log_abs_weighted_kernel(cplx z, double Wz, cplx w, double Ww) const;
  // Integral of K(z,z) over K, re-integrated with a rule of different node counts.
  double trace(int level = 0) const;

 private:
  Model model_;
  OrthoBasis basis_;
  bool radial_ = false;
};

// Integral of K(z,z) over {u0 <= |phi1(z)| <= u1} intersected with K (Gauss-Legendre in |phi1|,
// trapezoid in the angle); u0 must lie outside the inner radius of the exterior map.
double annulus_mass(const KernelEvaluator& K, double u0, double u1, int panels = 8, int n_theta = 0);

// sum a_j conj b_j = result * e^{log_scale}
cplx dot_conj(const ScaledVector& a, const ScaledVector& b, double* log_scale);

// ---------------- approximants ----------------

struct RegimeOptions {
  double C = 8.0;  // width constant of the edge window n - C sqrt(n log n)
};

struct IndexWindow {
  int lo = 0;
  int hi = -1;
  bool contains(int j) const { return j >= lo && j <= hi; }
};

IndexWindow edge_window(int n, const RegimeOptions& opts = {});
IndexWindow bifurcation_window(int n);
// Window used by the first partial sum: n - C sqrt(n log n) <= j <= n - 1.
IndexWindow sum_window(int n, const RegimeOptions& opts = {});

// E_{j,n}(z) from the tau = j/n droplet; checks the edge window unless unchecked.
cplx approximant_E(const Model& model, const TauFamily& tau, int j, int n, cplx z, bool check_regime = true,
                   const RegimeOptions& opts = {});
cplx approximant_E(const Model& model, int j, int n, cplx z, const RegimeOptions& opts = {});
// Phi_{j,n}(z) via the C1 or the C2 representation.
cplx approximant_Phi(const Model& model, int j, int n, cplx z, Curve representation);
double log_c_jn(const Model& model, int j, int n);
cplx approximant_F(const Model& model, int j, int n, cplx z, bool check_regime = true,
                   Curve representation = Curve::C1);
// Bound K sqrt(log n) e^{-n (Q - Qcheck_tau)(z)/2} without the constant.
double edge_envelope(const Model& model, const TauFamily& tau, int n, cplx z);
double bifurcation_envelope(const Model& model, int n, cplx z);

// P_tau(z) = tau log(phi_tau / phi1) + (q_tau - q1) / 2, real at infinity.
cplx p_tau(const Model& model, const TauFamily& tau, cplx z);

struct PartialSumValue {
  cplx sigma1;
  cplx sigma12;
  cplx total() const { return sigma1 + sigma12; }
};

class PartialSums {
 public:
  PartialSums(const Model& model, int n, const RegimeOptions& opts = {});
  PartialSumValue operator()(cplx z, cplx w) const;
  const IndexWindow& window1() const { return w1_; }
  const IndexWindow& window12() const { return w12_; }

 private:
  Model model_;
  int n_;
  IndexWindow w1_, w12_;
  std::vector<TauFamily> tau_;  // indexed by j - w1_.lo
};

}  // namespace outpost
