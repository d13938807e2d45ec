#include "outpost/szego.hpp"

#include <cmath>

namespace outpost {

const char* sign_name(SignConvention s) { return s == SignConvention::MinusC ? "minus_c" : "plus_c"; }

SignConvention parse_sign(const std::string& s) {
  if (s == "minus_c") return SignConvention::MinusC;
  if (s == "plus_c") return SignConvention::PlusC;
  fail(ErrorCode::ConfigError, "sign must be minus_c or plus_c, got '" + s + "'");
}

namespace {

SzegoParams params_from_model(const Model& m) {
  SzegoParams p;
  p.r1 = m.frame().r1();
  p.r2 = m.frame().r2();
  p.c = m.c();
  return p;
}

}  // namespace

SzegoEvaluator::SzegoEvaluator(const Model& model) : SzegoEvaluator(model, params_from_model(model)) {}

SzegoEvaluator::SzegoEvaluator(const Model& model, SzegoParams params) : model_(model), p_(params) {
  require(p_.r2 > p_.r1 && p_.r1 > 0, ErrorCode::InvalidParameter, "need r2 > r1 > 0");
  require(p_.tol > 0 && p_.tol <= 1e-6, ErrorCode::InvalidParameter, "tol must lie in (0, 1e-6]");
  esc_ = std::exp(sign_value(p_.sign) * p_.c);
  k_ = p_.r1 / p_.r2;
}

double SzegoEvaluator::weight11(int j) const {
  const double t = esc_ * std::pow(k_, 2 * j - 1);
  return std::isfinite(t) ? 1.0 / (1.0 + t) : 0.0;
}

double SzegoEvaluator::extend_weight(int j) const {
  const double t = esc_ * std::pow(k_, 2 * j - 1);
  if (!std::isfinite(t)) return 1.0;
  return t / (1.0 + t);
}

double SzegoEvaluator::weight22(int j) const {
  const double w = weight11(j);
  return w == 0.0 ? 0.0 : std::pow(k_, 2 * j - 1) * std::exp(-p_.c) * w;
}

double SzegoEvaluator::weight12(int j) const {
  const double w = weight11(j);
  return w == 0.0 ? 0.0 : std::pow(k_, j - 0.5) * std::exp(-0.5 * p_.c) * w;
}

SzegoEvaluator::Pre SzegoEvaluator::prefactor(cplx z, cplx w) const {
  const auto& fr = model_.frame();
  cplx pz = fr.phi1(z), pw = fr.phi1(w);
  const auto& h1 = model_.harmonic().h1;
  cplx sz = 1.0 / fr.map().sqrt_df(pz);
  cplx sw = 1.0 / fr.map().sqrt_df(pw);
  cplx e = std::exp(0.5 * (h1.at_w(pz) + std::conj(h1.at_w(pw))));
  return {pz * std::conj(pw), sz * std::conj(sw) * e / (2.0 * kPi)};
}

cplx SzegoEvaluator::s1(cplx z, cplx w) const {
  Pre p = prefactor(z, w);
  if (!(std::abs(p.X) > 1.0 + p_.tol))
    fail(ErrorCode::TooCloseToDiagonalCircle, "|phi1(z) conj phi1(w)| <= 1 + tol");
  return p.pref / (p.X - 1.0);
}

// sum_{j>=1} r^j weight(j), with |term_j| <= bound_scale * bound_ratio^j.
cplx SzegoEvaluator::sum_series(cplx r, const std::function<double(int)>& weight, double bound_scale,
                                double bound_ratio) const {
  if (!(bound_ratio < 1.0)) fail(ErrorCode::NonConvergent, "series ratio is not below one");
  cplx acc = 0.0, pw = 1.0;
  double bound = bound_scale;
  for (int j = 1; j <= p_.Jmax; ++j) {
    pw *= r;
    bound *= bound_ratio;
    acc += pw * weight(j);
    const double tail = bound * bound_ratio / (1.0 - bound_ratio);
    if (tail < p_.tol) return acc;
  }
  fail(ErrorCode::NonConvergent, "tail bound not met within Jmax terms");
}

cplx SzegoEvaluator::s12(cplx z, cplx w, Representation rep) const {
  const auto& fr = model_.frame();
  const double lim = k_ + p_.tol;
  if (!(std::abs(fr.phi1(z)) > lim) || !(std::abs(fr.phi1(w)) > lim))
    fail(ErrorCode::OutsideDomainD, "point outside |phi1| > r1/r2");
  Pre p = prefactor(z, w);
  const double aX = std::abs(p.X);
  if (rep == Representation::Auto) rep = aX >= 1.1 ? Representation::Form11 : Representation::Extend;
  const double ec = std::exp(-p_.c);
  switch (rep) {
    case Representation::Form11:
      return p.pref * sum_series(1.0 / p.X, [this](int j) { return weight11(j); }, 1.0, 1.0 / aX);
    case Representation::Form22: {
      // prefactor and variable in phi2-coordinates; identical terms after rescaling
      cplx Y = p.X * k_ * k_;
      cplx pref2 = p.pref * k_ * std::exp(p_.c);
      return pref2 * sum_series(1.0 / Y, [this](int j) { return weight22(j); }, ec / k_, 1.0 / aX);
    }
    case Representation::Form12: {
      cplx Z = p.X * k_;
      cplx pref12 = p.pref * std::sqrt(k_) * std::exp(0.5 * p_.c);
      return pref12 * sum_series(1.0 / Z, [this](int j) { return weight12(j); }, std::sqrt(ec / k_), 1.0 / aX);
    }
    case Representation::Extend: {
      if (std::abs(p.X - 1.0) < 1e-12) fail(ErrorCode::TooCloseToDiagonalCircle, "phi1(z) conj phi1(w) = 1");
      cplx s1v = p.pref / (p.X - 1.0);
      cplx corr = sum_series(1.0 / p.X, [this](int j) { return extend_weight(j); }, esc_ / k_, k_ * k_ / aX);
      return s1v - p.pref * corr;
    }
    case Representation::Auto: break;
  }
  return 0.0;
}

cplx SzegoEvaluator::basis(int j, Curve k, cplx z) const {
  const auto& fr = model_.frame();
  cplx w = fr.phi1(z);
  cplx h = model_.harmonic().h1.at_w(w);
  // r2 phi2 = r1 phi1 and r2 phi2' = r1 phi1', so f_{j,2} = e^{c/2} f_{j,1}
  cplx v = std::sqrt(p_.r1) / fr.map().sqrt_df(w) * std::pow(p_.r1 * w, -j) * std::exp(0.5 * h);
  return k == Curve::C1 ? v : v * std::exp(0.5 * p_.c);
}

double SzegoEvaluator::basis_norm(int j, Curve k) const {
  const double n1 = 2 * kPi * (std::pow(p_.r1, 1 - 2 * j) + esc_ * std::pow(p_.r2, 1 - 2 * j));
  return k == Curve::C1 ? n1 : std::exp(p_.c) * n1;
}

// ---------------- Heine ----------------

HeineDist heine_dist(double r1, double r2, double c) {
  const double k = r1 / r2;
  return {k * std::exp(-c), k * k};
}

double heine_log_pochhammer_neg(double theta, double q) {
  double acc = 0.0, t = theta;
  for (int j = 0; j < 100000 && t > 1e-18 * (1.0 + acc); ++j) {
    acc += std::log1p(t);
    t *= q;
  }
  return acc;
}

double heine_pmf(const HeineDist& d, int k) {
  require(k >= 0, ErrorCode::InvalidParameter, "k must be nonnegative");
  if (d.theta == 0.0) return k == 0 ? 1.0 : 0.0;
  double lg = 0.5 * k * (k - 1.0) * std::log(d.q) + k * std::log(d.theta) - heine_log_pochhammer_neg(d.theta, d.q);
  double qq = d.q;
  for (int i = 1; i <= k; ++i) {
    lg -= std::log1p(-qq);
    qq *= d.q;
  }
  return std::exp(lg);
}

double heine_mean(const HeineDist& d) {
  double acc = 0.0, t = d.theta;
  for (int k = 1; k < 100000 && t > 1e-18; ++k) {
    acc += t / (1.0 + t);
    t *= d.q;
  }
  return acc;
}

double mu_series(double r1, double r2, double c, SignConvention sign) {
  const double es = std::exp(sign_value(sign) * c);
  const double R = r2 / r1;
  double acc = 0.0;
  for (int j = 1; j < 100000; ++j) {
    const double t = es * std::pow(R, 2 * j - 1);
    const double term = std::isfinite(t) ? 1.0 / (1.0 + t) : 0.0;
    acc += term;
    if (term < 1e-18) break;
  }
  return acc;
}

double heine_mean(const SzegoParams& p) { return mu_series(p.r1, p.r2, p.c, kMuSign); }

double b2_mass_closed(double r, double r1, double r2, double c, SignConvention sign) {
  const double es = std::exp(sign_value(sign) * c);
  const double R = r2 / r1;
  double num = 0.0, den = 0.0;
  for (int j = 1; j < 100000; ++j) {
    const double t = es * std::pow(R, 2 * j - 1);
    const double v = std::isfinite(t) ? 1.0 / (1.0 + t) : 0.0;
    const double g = std::pow(r, -2.0 * j);
    num += g * v * v;
    den += g * v;
    if (g * v < 1e-20 * den) break;
  }
  return den > 0 ? num / den : 0.0;
}

cplx berezin_boundary(const SzegoEvaluator& S, cplx z, Curve k, const std::function<cplx(cplx)>& f,
                      const BerezinOptions& opts) {
  const Model& m = S.model();
  const auto& fr = m.frame();
  const double rho = k == Curve::C1 ? 1.0 : fr.ratio();
  const LaurentFunction& h = k == Curve::C1 ? m.harmonic().h1 : m.harmonic().h2;
  const double szz = S.s12(z, z).real();
  auto eval = [&](int N) {
    cplx acc = 0.0;
    for (int i = 0; i < N; ++i) {
      cplx w = std::polar(rho, 2 * kPi * i / N);
      cplx q = fr.map().f(w);
      const double ds = rho * std::abs(fr.map().df(w));
      acc += f(q) * std::norm(S.s12(z, q)) * std::exp(-h.at_w(w).real()) * ds;
    }
    return acc * (2 * kPi / N) / szz;
  };
  int N = opts.n0;
  cplx prev = eval(N);
  while (N < opts.n_max) {
    N *= 2;
    cplx cur = eval(N);
    if (std::abs(cur - prev) <= opts.tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  fail(ErrorCode::QuadratureNotConverged, "boundary quadrature did not settle");
}

double parseval_c2(const SzegoEvaluator& S, cplx z) {
  const Model& m = S.model();
  const auto& fr = m.frame();
  cplx w = fr.phi1(z);
  const double r = std::abs(w) * fr.r1() / fr.r2();
  double acc = 0.0;
  for (int j = 1; j <= S.params().Jmax; ++j) {
    const double v = S.weight22(j);
    const double t = std::pow(r, -2.0 * j) * v * v;
    acc += t;
    if (t < 1e-20 * acc) break;
  }
  const double dphi2 = std::abs(fr.phi1_prime(z)) * fr.r1() / fr.r2();
  return dphi2 * std::exp(m.harmonic().h2.at_w(w).real()) * acc / (2 * kPi);
}

}  // namespace outpost
