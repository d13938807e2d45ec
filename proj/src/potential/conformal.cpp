#include <algorithm>
#include <cmath>

#include "outpost/potential.hpp"

namespace outpost {

ExteriorMap ExteriorMap::radial(double r) {
  ExteriorMap m;
  m.kind_ = Kind::Radial;
  m.r_ = r;
  return m;
}

ExteriorMap ExteriorMap::rational(double r, double a, double b) {
  ExteriorMap m;
  m.kind_ = Kind::Rational;
  m.r_ = r;
  m.a_ = a;
  m.b_ = b;
  cplx disc = std::sqrt(cplx(b * b - a * b, 0.0));
  m.c1_ = b + disc;
  m.c2_ = b - disc;
  m.inner_ = std::max({std::abs(m.c1_), std::abs(m.c2_), std::abs(b)});
  return m;
}

ExteriorMap ExteriorMap::joukowski(double R, cplx beta) {
  ExteriorMap m;
  m.kind_ = Kind::Joukowski;
  m.r_ = R;
  m.beta_ = beta;
  m.sbeta_ = std::sqrt(beta);
  m.c1_ = m.sbeta_;
  m.c2_ = -m.sbeta_;
  m.inner_ = std::abs(m.sbeta_);
  return m;
}

cplx ExteriorMap::f(cplx w) const {
  switch (kind_) {
    case Kind::Radial: return r_ * w;
    case Kind::Rational: return r_ * w * (w - a_) / (w - b_);
    case Kind::Joukowski: return r_ * (w + beta_ / w);
  }
  return {};
}

cplx ExteriorMap::df(cplx w) const {
  switch (kind_) {
    case Kind::Radial: return r_;
    case Kind::Rational: {
      cplx d = w - b_;
      return r_ * (w * w - 2.0 * b_ * w + a_ * b_) / (d * d);
    }
    case Kind::Joukowski: return r_ * (1.0 - beta_ / (w * w));
  }
  return {};
}

cplx ExteriorMap::d2f(cplx w) const {
  switch (kind_) {
    case Kind::Radial: return 0.0;
    case Kind::Rational: {
      cplx d = w - b_;
      return 2.0 * r_ * b_ * (b_ - a_) / (d * d * d);
    }
    case Kind::Joukowski: return 2.0 * r_ * beta_ / (w * w * w);
  }
  return {};
}

cplx ExteriorMap::sqrt_df(cplx w) const {
  const double sr = std::sqrt(r_);
  switch (kind_) {
    case Kind::Radial: return sr;
    case Kind::Rational:
      return sr * std::sqrt(1.0 - c1_ / w) * std::sqrt(1.0 - c2_ / w) / (1.0 - b_ / w);
    case Kind::Joukowski: return sr * std::sqrt(1.0 - sbeta_ / w) * std::sqrt(1.0 + sbeta_ / w);
  }
  return {};
}

cplx ExteriorMap::invert(cplx z) const {
  cplx w1, w2;
  switch (kind_) {
    case Kind::Radial: return z / r_;
    case Kind::Rational: {
      cplx p = r_ * a_ + z;
      cplx s = std::sqrt(p * p - 4.0 * r_ * z * b_);
      w1 = (p + s) / (2.0 * r_);
      w2 = (p - s) / (2.0 * r_);
      break;
    }
    case Kind::Joukowski: {
      cplx s = std::sqrt(z * z - 4.0 * r_ * r_ * beta_);
      w1 = (z + s) / (2.0 * r_);
      w2 = (z - s) / (2.0 * r_);
      break;
    }
  }
  cplx w = std::abs(w1) >= std::abs(w2) ? w1 : w2;
  // one Newton step cleans up cancellation in the quadratic formula
  cplx d = df(w);
  if (std::abs(d) > 0) w -= (f(w) - z) / d;
  return w;
}

cplx ConformalFrame::phi1(cplx z) const {
  cplx w = map_.invert(z);
  const double inner = map_.inner_radius();
  if (inner > 0 && std::abs(w) <= inner * (1.0 + 1e-9))
    fail(ErrorCode::OutsideDomainD, "point lies beyond the continuation of phi1");
  return w;
}

cplx ConformalFrame::phi1_prime(cplx z) const { return 1.0 / map_.df(phi1(z)); }

cplx ConformalFrame::sqrt_phi1_prime(cplx z) const { return 1.0 / map_.sqrt_df(phi1(z)); }

cplx ConformalFrame::curveC1(double theta) const { return map_.f(std::polar(1.0, theta)); }

cplx ConformalFrame::curveC2(double theta) const { return map_.f(std::polar(ratio(), theta)); }

double ConformalFrame::arc_speed(double rho, double theta) const {
  return rho * std::abs(map_.df(std::polar(rho, theta)));
}

cplx ConformalFrame::normal(cplx p) const {
  cplx w = phi1(p);
  cplx t = w * map_.df(w);
  return t / std::abs(t);
}

double ConformalFrame::curvature(cplx p) const {
  cplx w = phi1(p);
  cplx d = map_.df(w);
  return std::real(1.0 + w * map_.d2f(w) / d) / std::abs(w * d);
}

cplx LaurentFunction::at_w(cplx w) const {
  cplx inv = 1.0 / w;
  cplx acc = 0.0;
  for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * inv + coeffs[j];
  return acc;
}

cplx LaurentFunction::derivative_w(cplx w) const {
  cplx inv = 1.0 / w;
  cplx acc = 0.0;
  for (std::size_t j = coeffs.size(); j-- > 1;) acc = acc * inv + static_cast<double>(j) * coeffs[j];
  return -acc * inv * inv;
}

LaurentFunction harmonic_solve(const ConformalFrame& frame, Curve curve,
                               const std::function<double(cplx)>& boundary_values,
                               const HarmonicSolveOptions& opts) {
  const double rho = curve == Curve::C1 ? 1.0 : frame.ratio();
  const auto& map = frame.map();
  int J = std::min(16, opts.max_terms);
  double last_residual = kInf;
  while (true) {
    const int N = 4 * J;
    std::vector<double> g(N);
    double scale = 1.0;
    for (int k = 0; k < N; ++k) {
      g[k] = boundary_values(map.f(std::polar(rho, 2 * kPi * k / N)));
      scale = std::max(scale, std::abs(g[k]));
    }
    LaurentFunction F;
    F.circle_radius = rho;
    F.coeffs.assign(J + 1, 0.0);
    for (int j = 0; j <= J; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < N; ++k) s += g[k] * std::polar(1.0, 2 * kPi * j * k / N);
      s /= static_cast<double>(N);
      if (std::abs(s) < 1e-14 * scale) s = 0.0;
      F.coeffs[j] = j == 0 ? cplx(s.real(), 0.0) : 2.0 * s * std::pow(rho, j);
    }
    while (F.coeffs.size() > 1 && F.coeffs.back() == 0.0) F.coeffs.pop_back();
    double residual = 0.0;
    for (int k = 0; k < N; ++k) {
      double th = 2 * kPi * (k + 0.5) / N;
      cplx w = std::polar(rho, th);
      residual = std::max(residual, std::abs(F.at_w(w).real() - boundary_values(map.f(w))));
    }
    last_residual = residual;
    if (residual <= opts.tol * scale) return F;
    if (J >= opts.max_terms) break;
    J = std::min(2 * J, opts.max_terms);
  }
  fail(ErrorCode::ResolutionExceeded,
       "Laurent residual " + std::to_string(last_residual) + " above tolerance at J = " +
           std::to_string(opts.max_terms));
}

}  // namespace outpost
