#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "outpost/potential.hpp"

namespace outpost {

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::RadialOutpost: return "radial";
    case ModelKind::QuadratureDomainOutpost: return "quadrature_domain";
    case ModelKind::EllipticGinibreOutpost: return "elliptic_ginibre";
    case ModelKind::Ginibre: return "ginibre";
  }
  return "unknown";
}

namespace {

// Laplacian of t0 (|phi|^2 - R^2)^2 / (2 |phi phi'|^2) at w = phi(z).
double outpost_laplacian(const ExteriorMap& map, cplx w, double R, double t0) {
  cplx fp = map.df(w);
  cplx p1 = 1.0 / fp;
  cplx p2 = -map.d2f(w) / (fp * fp * fp);
  cplx psi = w * p1;
  cplx dpsi = p1 * p1 + w * p2;
  double u = std::norm(w) - R * R;
  cplx du = p1 * std::conj(w);
  double lap_u = std::norm(p1);
  double v = 2.0 * std::norm(psi);
  cplx dv = 2.0 * dpsi * std::conj(psi);
  double lap_v = 2.0 * std::norm(dpsi);
  double F = u * u;
  cplx dF = 2.0 * u * du;
  double lap_F = 2.0 * std::norm(du) + 2.0 * u * lap_u;
  double lap = lap_F / v - 2.0 * std::real(dF * std::conj(dv)) / (v * v) - F * lap_v / (v * v) +
               2.0 * F * std::norm(dv) / (v * v * v);
  return t0 * lap;
}

// Boundary image of |w| = 1 has no self-intersections.
bool simple_boundary(const ExteriorMap& m, int N = 512) {
  std::vector<cplx> p(N);
  for (int k = 0; k < N; ++k) p[k] = m.f(std::polar(1.0, 2 * kPi * k / N));
  auto cross = [](cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); };
  for (int i = 0; i < N; ++i) {
    const cplx a = p[i], b = p[(i + 1) % N];
    for (int j = i + 2; j < N; ++j) {
      if (i == 0 && j == N - 1) continue;
      const cplx c = p[j], d = p[(j + 1) % N];
      if (cross(b - a, c - a) * cross(b - a, d - a) < 0 && cross(d - c, a - c) * cross(d - c, b - c) < 0)
        return false;
    }
  }
  return true;
}

// Critical points and pole inside the unit disk make f locally univalent on |w| >= 1;
// with a simple boundary curve it is univalent there.
bool qd_admissible(double alpha, double r, double w0) {
  if (!(std::abs(w0) > 1.0)) return false;
  const double a = w0 - (2.0 / r) * (w0 * w0 - 1.0) / (w0 * w0);
  const double b = 1.0 / w0;
  if (r * r * a * w0 - alpha <= 0) return false;
  ExteriorMap m = ExteriorMap::rational(r, a, b);
  if (m.inner_radius() >= 1.0 - 1e-12) return false;
  return simple_boundary(m);
}

std::vector<double> qd_real_roots(double alpha, double r) {
  // companion matrix of w^4 + c3 w^3 + c2 w^2 + c1 w + c0
  const double lead = r * r;
  const double c3 = -2 * r / lead, c2 = -alpha / lead, c1 = -2 * r / lead, c0 = 4 / lead;
  Eigen::Matrix4d C = Eigen::Matrix4d::Zero();
  C(0, 0) = -c3;
  C(0, 1) = -c2;
  C(0, 2) = -c1;
  C(0, 3) = -c0;
  C(1, 0) = C(2, 1) = C(3, 2) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix4d> es(C, false);
  std::vector<double> roots;
  for (int i = 0; i < 4; ++i) {
    cplx z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-7 * std::max(1.0, std::abs(z))) continue;
    double x = z.real();
    for (int it = 0; it < 50; ++it) {
      double p = (((lead * x - 2 * r) * x - alpha) * x - 2 * r) * x + 4;
      double dp = ((4 * lead * x - 6 * r) * x - 2 * alpha) * x - 2 * r;
      if (dp == 0) break;
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16 * std::abs(x)) break;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

std::optional<double> qd_root(double alpha, double r) {
  for (double x : qd_real_roots(alpha, r))
    if (qd_admissible(alpha, r, x)) return x;
  return std::nullopt;
}

double real_alpha(cplx alpha) {
  if (std::abs(alpha.imag()) > 0 || !(alpha.real() > -1.0 && alpha.real() <= 0.0))
    fail(ErrorCode::InvalidParameter, "quadrature-domain family needs real alpha in (-1, 0]");
  return alpha.real();
}

}  // namespace

double qd_prefactor(double alpha, double r1, double w0) {
  const double a = w0 - (2.0 / r1) * (w0 * w0 - 1.0) / (w0 * w0);
  return 1.0 / (r1 * r1 * a * w0 - alpha);
}

double critical_r1(cplx alpha_c) {
  const double alpha = real_alpha(alpha_c);
  if (alpha == 0.0) return 2.0;
  double lo = 1e-3;
  if (!qd_root(alpha, lo)) fail(ErrorCode::NoAdmissibleRoot, "no admissible root even for tiny r1");
  double hi = lo;
  while (qd_root(alpha, hi)) {
    lo = hi;
    hi += 0.05;
    if (hi > 10) fail(ErrorCode::NoAdmissibleRoot, "critical r1 not bracketed");
  }
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (qd_root(alpha, mid) ? lo : hi) = mid;
  }
  return hi;
}

double solve_w0(cplx alpha_c, double r1) {
  const double alpha = real_alpha(alpha_c);
  require(r1 > 0, ErrorCode::InvalidParameter, "r1 must be positive");
  if (alpha == 0.0) {
    if (r1 >= 2.0) fail(ErrorCode::Supercritical, "r1 >= critical value 2 for alpha = 0");
    return 2.0 / r1;
  }
  const double rstar = critical_r1(alpha_c);
  if (r1 >= rstar)
    fail(ErrorCode::Supercritical, "r1 = " + std::to_string(r1) + " >= critical " + std::to_string(rstar));
  auto root = qd_root(alpha, r1);
  if (!root) fail(ErrorCode::NoAdmissibleRoot, "no real root gives a univalent exterior map");
  return *root;
}

// ---------------- Model ----------------

double Model::theta() const { return frame_.r1() / frame_.r2() * std::exp(-harm_.c); }

double Model::q() const {
  double k = frame_.r1() / frame_.r2();
  return k * k;
}

Region Model::region(cplx z) const {
  if (params_.kind == ModelKind::Ginibre) return Region::Interior;
  const double rho = std::abs(frame_.map().invert(z));
  const double R = frame_.ratio();
  if (rho < 1.0) return Region::Interior;
  if (rho <= 1.0 + width_) return Region::N1;
  if (has_outpost() && std::abs(rho - R) <= width_ * R) return Region::N2;
  if (params_.gap_fill == GapFill::Smooth && rho < R * (1.0 - width_)) return Region::Gap;
  return Region::Outside;
}

double Model::Q1(cplx z) const {
  switch (params_.kind) {
    case ModelKind::QuadratureDomainOutpost:
      return A_ * (std::norm(z) - 2.0 * params_.alpha.real() * std::log(std::abs(z - 2.0)));
    case ModelKind::EllipticGinibreOutpost: return A_ * (std::norm(z) + std::real(params_.alpha * z * z));
    default: return A_ * std::norm(z);
  }
}

cplx Model::dQ1(cplx z) const {
  switch (params_.kind) {
    case ModelKind::QuadratureDomainOutpost: return A_ * (std::conj(z) - params_.alpha.real() / (z - 2.0));
    case ModelKind::EllipticGinibreOutpost: return A_ * (std::conj(z) + params_.alpha * z);
    default: return A_ * std::conj(z);
  }
}

double Model::outpost_term_w(cplx w) const {
  const double R = frame_.ratio();
  const double u = std::norm(w) - R * R;
  return params_.t0 * u * u * std::norm(frame_.map().df(w)) / (2.0 * std::norm(w));
}

double Model::gap_term_w(double rho) const {
  const double R = frame_.ratio();
  const double a = rho - (1.0 + width_);
  const double b = R * (1.0 - width_) - rho;
  return params_.t0 * a * a * b * b;
}

double Model::Q(cplx z) const {
  switch (region(z)) {
    case Region::Interior:
    case Region::N1: return Q1(z);
    case Region::N2: {
      cplx w = frame_.map().invert(z);
      return 2.0 * std::log(std::abs(w)) + harm_.q1.at_w(w).real() + outpost_term_w(w);
    }
    case Region::Gap: {
      cplx w = frame_.map().invert(z);
      return 2.0 * std::log(std::abs(w)) + harm_.q1.at_w(w).real() + gap_term_w(std::abs(w));
    }
    case Region::Outside: return kInf;
  }
  return kInf;
}

double Model::laplacianQ(cplx z) const {
  switch (region(z)) {
    case Region::Interior:
    case Region::N1: return A_;
    case Region::N2:
      return outpost_laplacian(frame_.map(), frame_.map().invert(z), frame_.ratio(), params_.t0);
    case Region::Gap: {
      const double h = 1e-4;
      double s = Q(z + h) + Q(z - h) + Q(z + cplx(0, h)) + Q(z - cplx(0, h)) - 4.0 * Q(z);
      return s / (4.0 * h * h);
    }
    case Region::Outside: return std::numeric_limits<double>::quiet_NaN();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Model::obstacle(cplx z) const {
  cplx w = frame_.map().invert(z);
  if (std::abs(w) < 1.0) return Q1(z);
  return 2.0 * std::log(std::abs(w)) + harm_.q1.at_w(w).real();
}

double Model::V(cplx z) const {
  cplx w = frame_.phi1(z);
  return 2.0 * std::log(std::abs(w)) + harm_.q1.at_w(w).real();
}

cplx Model::u(cplx z) const {
  cplx w = frame_.phi1(z);
  return w * std::exp(0.5 * harm_.q1.at_w(w));
}

cplx Model::u_from_c2(cplx z) const {
  cplx w = frame_.phi1(z);
  return w * (frame_.r1() / frame_.r2()) * std::exp(0.5 * harm_.q2.at_w(w));
}

double Model::varpi(cplx z) const {
  return std::log(std::abs(frame_.phi1(z))) / std::log(frame_.ratio());
}

std::vector<std::pair<double, double>> Model::radial_intervals(double r_max) const {
  if (params_.kind == ModelKind::Ginibre) return {{0.0, r_max}};
  const double r1 = frame_.r1(), R = frame_.ratio();
  std::vector<std::pair<double, double>> out{{0.0, r1 * (1.0 + width_)}};
  if (params_.gap_fill == GapFill::Smooth) out.push_back({r1 * (1.0 + width_), r1 * R * (1.0 - width_)});
  if (has_outpost()) out.push_back({r1 * R * (1.0 - width_), r1 * R * (1.0 + width_)});
  return out;
}

std::vector<Patch> Model::patches(double r_max) const {
  if (params_.kind == ModelKind::Ginibre) return {Patch{Patch::Shape::Disk, Region::Interior, 0.0, r_max}};
  const double R = frame_.ratio();
  std::vector<Patch> out{Patch{Patch::Shape::Star, Region::Interior, 0.0, 1.0},
                         Patch{Patch::Shape::Annulus, Region::N1, 1.0, 1.0 + width_}};
  if (params_.gap_fill == GapFill::Smooth)
    out.push_back(Patch{Patch::Shape::Annulus, Region::Gap, 1.0 + width_, R * (1.0 - width_)});
  if (has_outpost()) out.push_back(Patch{Patch::Shape::Annulus, Region::N2, R * (1.0 - width_), R * (1.0 + width_)});
  return out;
}

PatchPoint Model::patch_point(const Patch& patch, double u, double theta) const {
  PatchPoint p;
  cplx e = std::polar(1.0, theta);
  switch (patch.shape) {
    case Patch::Shape::Disk:
      p.z = u * e;
      p.jacobian = u / kPi;
      p.Q = A_ * u * u;
      return p;
    case Patch::Shape::Star: {
      const auto& m = frame_.map();
      cplx g = m.f(e);
      cplx dg = cplx(0, 1) * e * m.df(e);
      p.z = u * g;
      p.jacobian = u * std::imag(std::conj(g) * dg) / kPi;
      p.Q = Q1(p.z);
      return p;
    }
    case Patch::Shape::Annulus: {
      const auto& m = frame_.map();
      cplx w = u * e;
      p.z = m.f(w);
      p.jacobian = std::norm(m.df(w)) * u / kPi;
      if (patch.region == Region::N1) {
        p.Q = Q1(p.z);
      } else {
        double check = 2.0 * std::log(u) + harm_.q1.at_w(w).real();
        p.Q = check + (patch.region == Region::N2 ? outpost_term_w(w) : gap_term_w(u));
      }
      return p;
    }
  }
  return p;
}

double Model::outer_radius() const {
  if (params_.kind == ModelKind::Ginibre) return kInf;
  double rho = 1.0 + width_;
  if (has_outpost()) rho = frame_.ratio() * (1.0 + width_);
  double out = 0.0;
  for (int k = 0; k < 1440; ++k) out = std::max(out, std::abs(frame_.map().f(std::polar(rho, 2 * kPi * k / 1440))));
  return out * 1.001;
}

void Model::finish_build() {
  const double R = frame_.ratio();
  if (params_.kind != ModelKind::Ginibre) {
    require(R > 1.0, ErrorCode::InvalidParameter, "r2 must exceed the capacity r1 of C1");
    width_ = std::min(0.2, (R - 1.0) / 3.0);
    if (!(1.0 + width_ < R * (1.0 - width_)) || width_ < 1e-6)
      fail(ErrorCode::InvalidGeometry, "neighbourhoods of C1 and C2 overlap");
  }
  harm_.q1 = harmonic_solve(frame_, Curve::C1, [this](cplx z) { return Q1(z); });
  harm_.h1 = harmonic_solve(frame_, Curve::C1, [this](cplx) { return 0.5 * std::log(A_); });
  if (params_.kind == ModelKind::Ginibre) {
    harm_.c = kInf;
    return;
  }
  const double logR = std::log(R);
  harm_.q2 = harmonic_solve(frame_, Curve::C2, [this, logR](cplx z) {
    return 2.0 * logR + harm_.q1.at_w(frame_.map().invert(z)).real();
  });
  harm_.h2 = harmonic_solve(frame_, Curve::C2, [this, R](cplx z) {
    return 0.5 * std::log(outpost_laplacian(frame_.map(), frame_.map().invert(z), R, params_.t0));
  });
  harm_.c = harm_.h2.at_infinity() - harm_.h1.at_infinity();
}

Model build_radial_model(double r2, double t0, bool outpost) {
  require(r2 > 1.0, ErrorCode::InvalidParameter, "r2 must exceed r1 = 1");
  require(t0 > 0.0, ErrorCode::InvalidParameter, "t0 must be positive");
  Model m;
  m.params_ = ModelParams{ModelKind::RadialOutpost, 0.0, 1.0, r2, t0, GapFill::Infinite, outpost};
  m.frame_ = ConformalFrame(ExteriorMap::radial(1.0), r2);
  m.A_ = 1.0;
  m.finish_build();
  return m;
}

Model build_quadrature_domain_model(cplx alpha, double r1, double r2, double t0, GapFill gap) {
  const double a_re = real_alpha(alpha);
  require(r1 > 0 && r2 > r1 && t0 > 0, ErrorCode::InvalidParameter, "need 0 < r1 < r2 and t0 > 0");
  Model m;
  m.params_ = ModelParams{ModelKind::QuadratureDomainOutpost, alpha, r1, r2, t0, gap, true};
  const double w0 = solve_w0(alpha, r1);
  m.w0_ = w0;
  m.r1_star_ = critical_r1(alpha);
  if (a_re == 0.0) {
    m.frame_ = ConformalFrame(ExteriorMap::radial(r1), r2);
    m.A_ = 1.0 / (r1 * r1);
  } else {
    const double a = w0 - (2.0 / r1) * (w0 * w0 - 1.0) / (w0 * w0);
    m.frame_ = ConformalFrame(ExteriorMap::rational(r1, a, 1.0 / w0), r2);
    m.A_ = qd_prefactor(a_re, r1, w0);
  }
  m.finish_build();
  if (a_re != 0.0) {
    const double R = r2 / r1, w = m.width_;
    if (w0 <= 1.0 + w || (gap == GapFill::Smooth && w0 <= R * (1.0 + w)) || std::abs(w0 - R) <= w * R)
      fail(ErrorCode::InvalidGeometry, "the log singularity at z = 2 falls inside K");
  }
  return m;
}

Model build_elliptic_ginibre_model(cplx alpha, double r1, double r2, double t0, GapFill gap) {
  require(std::abs(alpha) < 1.0, ErrorCode::InvalidParameter, "|alpha| must be below 1");
  require(r1 > 0 && t0 > 0, ErrorCode::InvalidParameter, "need r1 > 0 and t0 > 0");
  const double cap = std::sqrt(r1 / (1.0 - std::norm(alpha)));
  require(r2 > cap, ErrorCode::InvalidParameter, "r2 must exceed the capacity of the elliptic droplet");
  Model m;
  m.params_ = ModelParams{ModelKind::EllipticGinibreOutpost, alpha, r1, r2, t0, gap, true};
  m.frame_ = ConformalFrame(alpha == 0.0 ? ExteriorMap::radial(cap) : ExteriorMap::joukowski(cap, -std::conj(alpha)), r2);
  m.A_ = 1.0 / r1;
  m.finish_build();
  return m;
}

Model build_ginibre_model(double A) {
  require(A > 0, ErrorCode::InvalidParameter, "A must be positive");
  Model m;
  const double cap = 1.0 / std::sqrt(A);
  m.params_ = ModelParams{ModelKind::Ginibre, 0.0, cap, 2.0 * cap, 1.0, GapFill::Infinite, false};
  m.frame_ = ConformalFrame(ExteriorMap::radial(cap), 2.0 * cap);
  m.A_ = A;
  m.finish_build();
  return m;
}

Model build_model(const ModelParams& p) {
  switch (p.kind) {
    case ModelKind::RadialOutpost: {
      require(p.r1 == 1.0, ErrorCode::InvalidParameter, "radial model has r1 = 1");
      Model m = build_radial_model(p.r2, p.t0, p.outpost);
      if (p.gap_fill != GapFill::Infinite) {
        m.params_.gap_fill = p.gap_fill;
        m.finish_build();
      }
      return m;
    }
    case ModelKind::QuadratureDomainOutpost:
      return build_quadrature_domain_model(p.alpha, p.r1, p.r2, p.t0, p.gap_fill);
    case ModelKind::EllipticGinibreOutpost:
      return build_elliptic_ginibre_model(p.alpha, p.r1, p.r2, p.t0, p.gap_fill);
    case ModelKind::Ginibre: return build_ginibre_model(1.0 / (p.r1 * p.r1));
  }
  fail(ErrorCode::InvalidParameter, "unknown model kind");
}

// ---------------- TauFamily ----------------

TauFamily::TauFamily(const Model& model, double tau) : base_(model), tau_(tau) {
  require(tau > 0.0 && tau <= 1.0, ErrorCode::InvalidParameter, "tau must lie in (0, 1]");
  const auto& map = model.frame().map();
  const double A_tau = model.droplet_laplacian() / tau;
  if (tau == 1.0) {
    frame_ = model.frame();
  } else if (map.is_radial()) {
    frame_ = ConformalFrame(ExteriorMap::radial(map.capacity() * std::sqrt(tau)), model.frame().r2());
  } else if (model.kind() == ModelKind::EllipticGinibreOutpost) {
    frame_ = ConformalFrame(ExteriorMap::joukowski(map.capacity() * std::sqrt(tau), -std::conj(model.params().alpha)),
                            model.frame().r2());
  } else {
    const double alpha = model.params().alpha.real();
    auto A_of = [alpha](double r) { return qd_prefactor(alpha, r, qd_root(alpha, r).value()); };
    double hi = model.params().r1;
    double lo = hi * tau;
    while (A_of(lo) < A_tau) lo *= tau;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      (A_of(mid) > A_tau ? lo : hi) = mid;
    }
    const double r = 0.5 * (lo + hi);
    const double w0 = qd_root(alpha, r).value();
    const double a = w0 - (2.0 / r) * (w0 * w0 - 1.0) / (w0 * w0);
    frame_ = ConformalFrame(ExteriorMap::rational(r, a, 1.0 / w0), model.frame().r2());
  }
  q_ = harmonic_solve(frame_, Curve::C1, [&model](cplx z) { return model.Q1(z); });
  h_ = harmonic_solve(frame_, Curve::C1, [&model](cplx) { return 0.5 * std::log(model.droplet_laplacian()); });
}

bool TauFamily::inside(cplx z) const { return std::abs(frame_.map().invert(z)) < 1.0; }

double TauFamily::obstacle(cplx z) const {
  cplx w = frame_.map().invert(z);
  if (std::abs(w) < 1.0) return base_.Q(z);
  return 2.0 * tau_ * std::log(std::abs(w)) + q_.at_w(w).real();
}

}  // namespace outpost
