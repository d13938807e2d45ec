#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "outpost/error.hpp"

namespace outpost {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ModelKind { RadialOutpost, QuadratureDomainOutpost, EllipticGinibreOutpost, Ginibre };
enum class GapFill { Infinite, Smooth };

const char* model_kind_name(ModelKind kind);

struct ModelParams {
  ModelKind kind = ModelKind::RadialOutpost;
  cplx alpha{0.0, 0.0};
  double r1 = 1.0;  // capacity of C1 (elliptic: droplet area, see build_elliptic_ginibre_model)
  double r2 = 1.25;
  double t0 = 1.0;
  GapFill gap_fill = GapFill::Infinite;
  bool outpost = true;  // false: Q = +inf on N2 (zero-outpost control)
};

// Inverse exterior map f = phi1^{-1}, analytic on |w| > inner_radius().
class ExteriorMap {
 public:
  static ExteriorMap radial(double r);
  // f(w) = r w (w - a) / (w - b)
  static ExteriorMap rational(double r, double a, double b);
  // f(w) = R (w + beta / w)
  static ExteriorMap joukowski(double R, cplx beta);

  cplx f(cplx w) const;
  cplx df(cplx w) const;
  cplx d2f(cplx w) const;
  // sqrt(f'(w)) on the branch positive at infinity.
  cplx sqrt_df(cplx w) const;
  // Root of f(w) = z of largest modulus; no domain check.
  cplx invert(cplx z) const;

  double capacity() const { return r_; }
  double inner_radius() const { return inner_; }
  bool is_radial() const { return kind_ == Kind::Radial; }

 private:
  enum class Kind { Radial, Rational, Joukowski };
  Kind kind_ = Kind::Radial;
  double r_ = 1.0;
  double a_ = 0.0, b_ = 0.0;
  cplx beta_{0.0}, sbeta_{0.0};
  cplx c1_{0.0}, c2_{0.0};  // critical points of f
  double inner_ = 0.0;
};

class ConformalFrame {
 public:
  ConformalFrame() = default;
  ConformalFrame(ExteriorMap map, double r2) : map_(map), r2_(r2) {}

  const ExteriorMap& map() const { return map_; }
  double r1() const { return map_.capacity(); }
  double r2() const { return r2_; }
  double ratio() const { return r2_ / r1(); }

  // phi1 continued inward as far as the map allows; throws OutsideDomainD below that.
  cplx phi1(cplx z) const;
  cplx phi1_prime(cplx z) const;
  cplx sqrt_phi1_prime(cplx z) const;
  cplx phi1_inverse(cplx w) const { return map_.f(w); }
  cplx phi2(cplx z) const { return phi1(z) * (r1() / r2_); }
  cplx phi2_prime(cplx z) const { return phi1_prime(z) * (r1() / r2_); }
  cplx sqrt_phi2_prime(cplx z) const { return sqrt_phi1_prime(z) * std::sqrt(r1() / r2_); }

  cplx curveC1(double theta) const;
  cplx curveC2(double theta) const;
  // |dz/dtheta| along the image of the circle |w| = rho.
  double arc_speed(double rho, double theta) const;
  // Exterior unit normal and curvature of the level curve through p.
  cplx normal(cplx p) const;
  double curvature(cplx p) const;

 private:
  ExteriorMap map_ = ExteriorMap::radial(1.0);
  double r2_ = 2.0;
};

// F(w) = sum_j a_j w^{-j}, w = phi1(z).
struct LaurentFunction {
  std::vector<cplx> coeffs;
  double circle_radius = 1.0;  // |w| of the curve the data was given on

  bool empty() const { return coeffs.empty(); }
  cplx at_w(cplx w) const;
  cplx derivative_w(cplx w) const;
  double at_infinity() const { return coeffs.empty() ? 0.0 : coeffs[0].real(); }
};

enum class Curve { C1, C2 };

struct HarmonicSolveOptions {
  int max_terms = 64;
  double tol = 1e-10;
};

// Laurent solution of Re F = g on the chosen curve, real at infinity.
LaurentFunction harmonic_solve(const ConformalFrame& frame, Curve curve,
                               const std::function<double(cplx)>& boundary_values,
                               const HarmonicSolveOptions& opts = {});

struct HarmonicData {
  LaurentFunction q1, q2, h1, h2;
  double c = 0.0;
};

enum class Region { Interior, N1, Gap, N2, Outside };

// Parameter-space patch of K. Star: z = u * C1(theta), u in [u0, u1].
// Annulus: z = f(u e^{i theta}).
struct Patch {
  enum class Shape { Star, Annulus, Disk };
  Shape shape = Shape::Star;
  Region region = Region::Interior;
  double u0 = 0.0, u1 = 1.0;
};

struct PatchPoint {
  cplx z;
  double jacobian;  // dA / (du dtheta), dA = d^2z / pi
  double Q;
};

class Model {
 public:
  const ModelParams& params() const { return params_; }
  ModelKind kind() const { return params_.kind; }
  const ConformalFrame& frame() const { return frame_; }
  const HarmonicData& harmonic() const { return harm_; }

  bool has_outpost() const { return params_.kind != ModelKind::Ginibre && params_.outpost; }
  bool is_radial() const { return frame_.map().is_radial(); }
  // Laplacian of Q on the droplet neighbourhood (Hele-Shaw constant).
  double droplet_laplacian() const { return A_; }
  double width() const { return width_; }
  double c() const { return harm_.c; }
  double theta() const;
  double q() const;
  std::optional<double> w0() const { return w0_; }
  std::optional<double> r1_star() const { return r1_star_; }

  Region region(cplx z) const;
  bool in_K(cplx z) const { return region(z) != Region::Outside; }
  double Q(cplx z) const;
  double Q1(cplx z) const;
  cplx dQ1(cplx z) const;  // partial_z Q1
  double laplacianQ(cplx z) const;
  double obstacle(cplx z) const;
  double V(cplx z) const;
  cplx u(cplx z) const;
  cplx u_from_c2(cplx z) const;
  double varpi(cplx z) const;
  cplx q1(cplx z) const { return harm_.q1.at_w(frame_.phi1(z)); }
  cplx q2(cplx z) const { return harm_.q2.at_w(frame_.phi1(z)); }
  cplx h1(cplx z) const { return harm_.h1.at_w(frame_.phi1(z)); }
  cplx h2(cplx z) const { return harm_.h2.at_w(frame_.phi1(z)); }

  // Radial profile of Q (rotation-invariant models only); +inf outside K.
  template <class T>
  T radial_Q(const T& r, bool& finite) const;
  // Radial intervals making up K for rotation-invariant models (Ginibre: cut at r_max).
  std::vector<std::pair<double, double>> radial_intervals(double r_max = 0.0) const;

  // K as a union of parameter patches (Ginibre: disk of radius r_max).
  std::vector<Patch> patches(double r_max = 0.0) const;
  PatchPoint patch_point(const Patch& patch, double u, double theta) const;
  // Bound on |z| over K.
  double outer_radius() const;

 private:
  friend Model build_radial_model(double, double, bool);
  friend Model build_quadrature_domain_model(cplx, double, double, double, GapFill);
  friend Model build_elliptic_ginibre_model(cplx, double, double, double, GapFill);
  friend Model build_ginibre_model(double);
  friend Model build_model(const ModelParams&);
  friend class TauFamily;

  void finish_build();
  double outpost_term_w(cplx w) const;
  double gap_term_w(double rho) const;

  ModelParams params_;
  ConformalFrame frame_;
  HarmonicData harm_;
  double A_ = 1.0;
  double width_ = 0.2;
  std::optional<double> w0_, r1_star_;
};

Model build_radial_model(double r2, double t0, bool outpost = true);
Model build_quadrature_domain_model(cplx alpha, double r1, double r2, double t0,
                                    GapFill gap = GapFill::Infinite);
Model build_elliptic_ginibre_model(cplx alpha, double r1, double r2, double t0,
                                   GapFill gap = GapFill::Infinite);
// Q = A |z|^2 on all of C, no outpost; A = 1 by default.
Model build_ginibre_model(double A = 1.0);
Model build_model(const ModelParams& params);

// Quadrature-domain family helpers.
double solve_w0(cplx alpha, double r1);
double critical_r1(cplx alpha);
// Laplacian prefactor A for the map with parameters (alpha, r1, w0).
double qd_prefactor(double alpha, double r1, double w0);

// Droplet of Q/tau and its exterior data.
class TauFamily {
 public:
  TauFamily(const Model& model, double tau);

  double tau() const { return tau_; }
  const ConformalFrame& frame() const { return frame_; }
  cplx phi(cplx z) const { return frame_.phi1(z); }
  cplx phi_prime(cplx z) const { return frame_.phi1_prime(z); }
  cplx sqrt_phi_prime(cplx z) const { return frame_.sqrt_phi1_prime(z); }
  cplx q(cplx z) const { return q_.at_w(frame_.phi1(z)); }
  cplx h(cplx z) const { return h_.at_w(frame_.phi1(z)); }
  const LaurentFunction& q_laurent() const { return q_; }
  const LaurentFunction& h_laurent() const { return h_; }
  // Obstacle of Q with growth 2 tau log|z|.
  double obstacle(cplx z) const;
  bool inside(cplx z) const;

 private:
  Model base_;
  double tau_;
  ConformalFrame frame_;
  LaurentFunction q_, h_;
};

// key=value model file; throws Error(ConfigError) naming the line.
ModelParams parse_model_text(const std::string& text);
ModelParams load_model_file(const std::string& path);
std::string model_params_text(const ModelParams& params);

// ---- template implementation ----

template <class T>
T Model::radial_Q(const T& r, bool& finite) const {
  finite = true;
  using std::log;
  if (params_.kind == ModelKind::Ginibre) return T(A_) * r * r;
  const double r1 = frame_.r1();
  const double R = frame_.ratio();
  const T rho = r / T(r1);
  if (rho <= T(1.0 + width_)) return T(A_) * r * r;
  const T check = 2 * log(rho) + T(A_ * r1 * r1);
  if (has_outpost() && rho >= T(R * (1.0 - width_)) && rho <= T(R * (1.0 + width_))) {
    T d = rho * rho - T(R * R);
    return check + T(params_.t0 * r1 * r1) * d * d / (2 * rho * rho);
  }
  if (params_.gap_fill == GapFill::Smooth && rho < T(R * (1.0 - width_))) {
    T a = rho - T(1.0 + width_);
    T b = T(R * (1.0 - width_)) - rho;
    return check + T(params_.t0) * a * a * b * b;
  }
  finite = false;
  return T(0);
}

}  // namespace outpost
