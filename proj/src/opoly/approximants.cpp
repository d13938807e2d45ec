#include <cmath>

#include "outpost/opoly.hpp"

namespace outpost {

IndexWindow edge_window(int n, const RegimeOptions& opts) {
  const double ln = std::log(static_cast<double>(n));
  IndexWindow w;
  w.lo = std::max(0, static_cast<int>(std::ceil(n - opts.C * std::sqrt(n * ln))));
  w.hi = static_cast<int>(std::floor(n - ln * ln));
  return w;
}

IndexWindow bifurcation_window(int n) {
  const double ln = std::log(static_cast<double>(n));
  return {std::max(0, static_cast<int>(std::ceil(n - ln * ln))), n - 1};
}

IndexWindow sum_window(int n, const RegimeOptions& opts) {
  // j = 0 has no tau-droplet; its term is covered by the low-index tail bound on B1 and is dropped
  return {std::max(1, edge_window(n, opts).lo), n - 1};
}

cplx approximant_E(const Model& model, const TauFamily& tau, int j, int n, cplx z, bool check_regime,
                   const RegimeOptions& opts) {
  if (check_regime && !edge_window(n, opts).contains(j))
    fail(ErrorCode::OutOfRegime, "j = " + std::to_string(j) + " outside the edge window");
  require(std::abs(tau.tau() - static_cast<double>(j) / n) < 1e-12, ErrorCode::InvalidParameter,
          "tau family does not match j/n");
  const double Q = model.Q(z);
  if (!std::isfinite(Q)) return 0.0;
  const cplx w = tau.phi(z);
  const cplx e = 0.25 * std::log(n / (2 * kPi)) + static_cast<double>(j) * std::log(w) - 0.5 * n * (Q - tau.q(z)) +
                 0.5 * tau.h(z);
  return std::exp(e) * tau.sqrt_phi_prime(z);
}

cplx approximant_E(const Model& model, int j, int n, cplx z, const RegimeOptions& opts) {
  if (!edge_window(n, opts).contains(j))
    fail(ErrorCode::OutOfRegime, "j = " + std::to_string(j) + " outside the edge window");
  TauFamily tau(model, static_cast<double>(j) / n);
  return approximant_E(model, tau, j, n, z, false, opts);
}

namespace {

// log of Phi_{j,n}(z) / sqrt(phi_k'(z)) in the chosen representation
cplx log_phi_core(const Model& model, int j, int n, cplx z, Curve rep) {
  const auto& fr = model.frame();
  const auto& H = model.harmonic();
  const cplx w = fr.phi1(z);
  if (rep == Curve::C1) {
    const double lead = (j + 0.5) * std::log(fr.r1()) - 0.5 * n * H.q1.at_infinity() - 0.5 * H.h1.at_infinity();
    return lead + static_cast<double>(j) * std::log(w) + 0.5 * n * H.q1.at_w(w) + 0.5 * H.h1.at_w(w);
  }
  const cplx w2 = w * (fr.r1() / fr.r2());
  const double lead = (j + 0.5) * std::log(fr.r2()) - 0.5 * n * H.q2.at_infinity() - 0.5 * H.h2.at_infinity();
  return lead + static_cast<double>(j) * std::log(w2) + 0.5 * n * H.q2.at_w(w) + 0.5 * H.h2.at_w(w);
}

cplx sqrt_prime(const Model& model, cplx z, Curve rep) {
  return rep == Curve::C1 ? model.frame().sqrt_phi1_prime(z) : model.frame().sqrt_phi2_prime(z);
}

}  // namespace

cplx approximant_Phi(const Model& model, int j, int n, cplx z, Curve representation) {
  require(model.has_outpost(), ErrorCode::InvalidParameter, "Phi needs a model with an outpost");
  return std::exp(log_phi_core(model, j, n, z, representation)) * sqrt_prime(model, z, representation);
}

double log_c_jn(const Model& model, int j, int n) {
  const auto& fr = model.frame();
  const auto& H = model.harmonic();
  const double a1 = (2 * j + 1) * std::log(fr.r1()) - n * H.q1.at_infinity() - H.h1.at_infinity();
  const double a2 = (2 * j + 1) * std::log(fr.r2()) - n * H.q2.at_infinity() - H.h2.at_infinity();
  const double mx = std::max(a1, a2);
  return 0.5 * std::log(2 * kPi / n) + mx + std::log(std::exp(a1 - mx) + std::exp(a2 - mx));
}

cplx approximant_F(const Model& model, int j, int n, cplx z, bool check_regime, Curve representation) {
  if (check_regime && !bifurcation_window(n).contains(j))
    fail(ErrorCode::OutOfRegime, "j = " + std::to_string(j) + " outside the bifurcation window");
  require(model.has_outpost(), ErrorCode::InvalidParameter, "F needs a model with an outpost");
  const double Q = model.Q(z);
  if (!std::isfinite(Q)) return 0.0;
  const cplx e = log_phi_core(model, j, n, z, representation) - 0.5 * log_c_jn(model, j, n) - 0.5 * n * Q;
  return std::exp(e) * sqrt_prime(model, z, representation);
}

double edge_envelope(const Model& model, const TauFamily& tau, int n, cplx z) {
  const double Q = model.Q(z);
  if (!std::isfinite(Q)) return 0.0;
  return std::sqrt(std::log(static_cast<double>(n))) * std::exp(-0.5 * n * (Q - tau.obstacle(z)));
}

double bifurcation_envelope(const Model& model, int n, cplx z) {
  const double Q = model.Q(z);
  if (!std::isfinite(Q)) return 0.0;
  return std::sqrt(std::log(static_cast<double>(n))) * std::exp(-0.5 * n * (Q - model.obstacle(z)));
}

cplx p_tau(const Model& model, const TauFamily& tau, cplx z) {
  return tau.tau() * std::log(tau.phi(z) / model.frame().phi1(z)) + 0.5 * (tau.q(z) - model.q1(z));
}

PartialSums::PartialSums(const Model& model, int n, const RegimeOptions& opts)
    : model_(model), n_(n), w1_(sum_window(n, opts)), w12_(bifurcation_window(n)) {
  require(model.has_outpost(), ErrorCode::InvalidParameter, "partial sums need a model with an outpost");
  for (int j = w1_.lo; j <= w1_.hi; ++j) tau_.emplace_back(model, static_cast<double>(j) / n);
}

PartialSumValue PartialSums::operator()(cplx z, cplx w) const {
  PartialSumValue out{0.0, 0.0};
  for (int j = w1_.lo; j <= w1_.hi; ++j) {
    const TauFamily& t = tau_[j - w1_.lo];
    const cplx ez = approximant_E(model_, t, j, n_, z, false);
    const cplx ew = approximant_E(model_, t, j, n_, w, false);
    out.sigma1 += ez * std::conj(ew);
    if (w12_.contains(j)) {
      const cplx fz = approximant_F(model_, j, n_, z, false);
      const cplx fw = approximant_F(model_, j, n_, w, false);
      out.sigma12 += fz * std::conj(fw) - ez * std::conj(ew);
    }
  }
  return out;
}

}  // namespace outpost
