#include "outpost/verify.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "outpost/sampler.hpp"

namespace outpost {

// ---------------- reports ----------------

void finalize(TheoremReport& r) {
  std::set<int> ns(r.n.begin(), r.n.end());
  for (const auto& d : r.deviations) ns.insert(d.n);
  r.n.assign(ns.begin(), ns.end());
  bool ok = true;
  std::map<std::string, std::map<int, std::pair<double, double>>> by_label;
  std::vector<double> all;
  for (const auto& d : r.deviations) {
    if (!(d.value <= d.budget)) ok = false;  // NaN fails
    all.push_back(d.value);
    if (d.trend) by_label[d.label][d.n] = {d.value, d.floor};
  }
  for (const auto& [label, series] : by_label) {
    double prev = kInf;
    for (const auto& [n, vf] : series) {
      if (vf.first > prev && vf.first > vf.second) ok = false;
      prev = vf.first;
    }
  }
  r.median_deviation = 0.0;
  if (!all.empty()) {
    std::nth_element(all.begin(), all.begin() + all.size() / 2, all.end());
    r.median_deviation = all[all.size() / 2];
  }
  // max over trend deviations per n, and the decay fit
  std::map<int, double> mx;
  for (const auto& d : r.deviations)
    if (d.trend) mx[d.n] = std::max(mx[d.n], d.value);
  r.max_deviation = mx.empty() ? 0.0 : mx.rbegin()->second;
  if (mx.empty()) {
    r.max_deviation = 0.0;
    for (const auto& d : r.deviations) r.max_deviation = std::max(r.max_deviation, d.value);
  }
  r.exponent_fit.reset();
  if (mx.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(mx.size());
    for (const auto& [n, v] : mx) {
      const double x = std::log(n), y = std::log(std::max(v, 1e-300));
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    r.exponent_fit = -(k * sxy - sx * sy) / (k * sxx - sx * sx);
  }
  if (!(r.max_deviation <= r.tolerance)) ok = false;
  if (r.require_positive_exponent && !(r.exponent_fit && *r.exponent_fit > 0)) ok = false;
  r.pass = ok;
}

KernelSet::KernelSet(Model model, MomentOptions opts) : model_(std::move(model)), opts_(opts) {}

const KernelEvaluator& KernelSet::at(int n) {
  auto it = cache_.find(n);
  if (it == cache_.end())
    it = cache_.emplace(n, std::make_unique<KernelEvaluator>(KernelEvaluator::build(model_, n, opts_))).first;
  return *it->second;
}

// ---------------- geometry helpers ----------------

cplx curve_point(const Model& m, Curve k, double theta) {
  const double rho = k == Curve::C1 ? 1.0 : m.frame().ratio();
  return m.frame().map().f(std::polar(rho, theta));
}

cplx exterior_normal(const Model& m, cplx p) {
  const cplx w = m.frame().phi1(p);
  const cplx v = w * m.frame().map().df(w);
  return v / std::abs(v);
}

double curve_laplacian(const Model& m, cplx p) {
  double a = m.laplacianQ(p);
  if (!std::isfinite(a)) a = m.laplacianQ(p - 1e-9 * exterior_normal(m, p));
  return a;
}

cplx zoom_point(const Model& m, cplx p, double x, int n) {
  return p + x / std::sqrt(2.0 * n * curve_laplacian(m, p)) * exterior_normal(m, p);
}

double belt_delta(int n, double M) { return M * std::sqrt(std::log(static_cast<double>(n)) / n); }

cplx integrate_over_K(const Model& m, const std::function<cplx(cplx)>& g, int n_theta, int panels,
                      const std::vector<double>& star_breaks, const std::vector<double>& chart_breaks) {
  const auto& gl = mp::gauss_legendre_d(24);
  std::vector<Patch> patches =
      m.kind() == ModelKind::Ginibre ? m.patches(1.0 / std::sqrt(m.droplet_laplacian()) + 12.0) : m.patches();
  cplx total = 0.0;
  const double dt = 2 * kPi / n_theta;
  for (const Patch& p : patches) {
    std::vector<double> br{p.u0, p.u1};
    const auto& extra = p.shape == Patch::Shape::Annulus ? chart_breaks : star_breaks;
    for (double b : extra)
      if (b > p.u0 && b < p.u1) br.push_back(b);
    std::sort(br.begin(), br.end());
    for (size_t s = 0; s + 1 < br.size(); ++s) {
      const double h = (br[s + 1] - br[s]) / panels;
      for (int q = 0; q < panels; ++q)
        for (size_t k = 0; k < gl.nodes.size(); ++k) {
          const double u = br[s] + h * (q + 0.5 * (gl.nodes[k] + 1.0));
          cplx ring = 0.0;
          for (int t = 0; t < n_theta; ++t) {
            PatchPoint pp = m.patch_point(p, u, dt * (t + 0.5));
            if (!std::isfinite(pp.Q)) continue;
            ring += g(pp.z) * pp.jacobian;
          }
          total += 0.5 * h * gl.weights[k] * ring * dt;
        }
    }
  }
  return total;
}

double exterior_modulus(const KernelEvaluator& K, cplx z, cplx w) {
  const Model& m = K.model();
  return std::abs(K.weighted_kernel(z, m.V(z), w, m.V(w)));
}

namespace {

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(4);
  o << x;
  return o.str();
}

std::string point_label(cplx z) { return "(" + fmt(z.real()) + "," + fmt(z.imag()) + ")"; }

// z in B1 or Ext C1, with the conformal variable
cplx checked_phi1(const Model& m, cplx z, double delta1) {
  cplx w;
  try {
    w = m.frame().phi1(z);
  } catch (const Error&) {
    fail(ErrorCode::PreconditionViolated, "point not in B1 or Ext C1");
  }
  require(std::abs(w) >= 1.0 - delta1, ErrorCode::PreconditionViolated, "point not in B1 or Ext C1");
  return w;
}

double mu_value(const Model& m, SignConvention sign) {
  return mu_series(m.frame().r1(), m.frame().r2(), m.c(), sign);
}

SzegoEvaluator szego_for(const Model& m, SignConvention sign) {
  SzegoParams sp;
  sp.r1 = m.frame().r1();
  sp.r2 = m.frame().r2();
  sp.c = m.c();
  sp.sign = sign;
  return SzegoEvaluator(m, sp);
}

// integral of K_n(z,z) over the belt B2
double belt_mass(const KernelEvaluator& K, double M) {
  const Model& m = K.model();
  CountWindow W = belt_window(m, K.n(), M);
  const double R = m.frame().ratio();
  return annulus_mass(K, W.lo * R, W.hi * R);
}

}  // namespace

std::vector<std::pair<cplx, cplx>> default_szego_pairs(const Model& m) {
  const double R = m.kind() == ModelKind::Ginibre ? 1.0 : m.frame().ratio();
  auto pt = [&](double rho, double th) { return m.frame().map().f(std::polar(rho * R, th)); };
  return {
      {pt(1.1, 0.0), pt(1.2, kPi / 3)}, {pt(1.05, 0.3), pt(1.15, 2.0)}, {pt(1.3, 1.0), pt(1.3, -1.0)},
      {pt(1.5, 0.0), pt(2.0, kPi)},     {pt(2.0, 0.5), pt(1.1, -2.5)},  {pt(3.0, 0.0), pt(3.0, 1.5)},
      {pt(1.2, 0.7), pt(1.6, 0.1)},     {pt(1.1, 2.2), pt(4.0, -0.4)},  {pt(1.4, -2.0), pt(1.25, 3.0)},
      {pt(2.5, 1.2), pt(1.05, 1.9)},
  };
}

// ---------------- Szego-type convergence ----------------

TheoremReport check_szego_convergence(KernelSet& ks, const std::vector<int>& ns,
                                      const std::vector<std::pair<cplx, cplx>>& pairs, const VerifyOptions& opts) {
  const Model& m = ks.model();
  const bool gin = m.kind() == ModelKind::Ginibre;
  TheoremReport r;
  r.theorem = gin ? "szego_convergence_ginibre_control" : "szego_convergence";
  r.n = ns;
  r.grid = std::to_string(pairs.size()) + " exterior pairs, eta = " + fmt(opts.eta);
  r.tolerance = opts.tol;
  r.require_positive_exponent = ns.size() >= 2;
  SzegoEvaluator S = szego_for(m, opts.kernel_sign);
  std::vector<cplx> expected;
  for (const auto& [z, w] : pairs) {
    const int nmin = *std::min_element(ns.begin(), ns.end());
    const double d1 = belt_delta(nmin, opts.M);
    cplx pz = checked_phi1(m, z, d1), pw = checked_phi1(m, w, d1);
    require(std::abs(pz * std::conj(pw) - 1.0) >= opts.eta, ErrorCode::PreconditionViolated,
            "pair closer than eta to the diagonal circle");
    expected.push_back(gin ? S.s1(z, w) : S.s12(z, w));
  }
  for (int n : ns) {
    const KernelEvaluator& K = ks.at(n);
    for (size_t i = 0; i < pairs.size(); ++i) {
      const auto& [z, w] = pairs[i];
      const double Rn = exterior_modulus(K, z, w) / (std::sqrt(2 * kPi * n) * std::abs(expected[i]));
      r.deviations.push_back({"pair " + point_label(z) + " " + point_label(w), n, std::abs(Rn - 1.0), kInf, true});
    }
  }
  finalize(r);
  return r;
}

TheoremReport check_far_exterior(KernelSet& ks, int n, const VerifyOptions& opts) {
  const Model& m = ks.model();
  TheoremReport r;
  r.theorem = "far_exterior_decay";
  r.n = {n};
  const double d = belt_delta(n, opts.M);
  r.grid = "w in Ext C1 at distance >= " + fmt(d) + " from C1 and C2, z on C1 and C2";
  r.tolerance = std::pow(static_cast<double>(n), -5.0);
  const KernelEvaluator& K = ks.at(n);
  const double R = m.frame().ratio();
  std::vector<cplx> zs{curve_point(m, Curve::C1, 0.3)};
  if (m.has_outpost()) zs.push_back(curve_point(m, Curve::C2, -0.2));
  // candidate points on level lines of |phi1|, kept if far from both curves
  std::vector<cplx> boundary;
  for (int k = 0; k < 256; ++k) {
    boundary.push_back(curve_point(m, Curve::C1, 2 * kPi * k / 256));
    if (m.has_outpost()) boundary.push_back(curve_point(m, Curve::C2, 2 * kPi * k / 256));
  }
  int used = 0, finite = 0;
  std::vector<double> worst(zs.size(), 0.0);
  for (double rho = 1.0 + 1e-3; rho <= 3.0 * R; rho *= 1.02)
    for (int k = 0; k < 16; ++k) {
      const cplx w = m.frame().map().f(std::polar(rho, 2 * kPi * (k + 0.5) / 16));
      double dist = kInf;
      for (cplx b : boundary) dist = std::min(dist, std::abs(w - b));
      if (dist < d) continue;
      ++used;
      if (std::isfinite(m.Q(w))) ++finite;
      for (size_t i = 0; i < zs.size(); ++i) worst[i] = std::max(worst[i], std::abs(K.kernel(zs[i], w)));
    }
  for (size_t i = 0; i < zs.size(); ++i)
    r.deviations.push_back({"max |K| from z " + point_label(zs[i]), n, worst[i], r.tolerance, false});
  r.notes.push_back(std::to_string(used) + " grid points, " + std::to_string(finite) + " with finite Q");
  if (used == 0) r.notes.push_back("no grid point is that far from the curves");
  finalize(r);
  return r;
}

// ---------------- scaled correlations ----------------

TheoremReport check_scaled_correlations(KernelSet& ks, const std::vector<int>& ns, cplx p, cplx q,
                                        const std::vector<std::pair<double, double>>& st_grid,
                                        const VerifyOptions& opts) {
  const Model& m = ks.model();
  const double R = m.frame().ratio();
  auto on_curve = [&](cplx z) {
    const double a = std::abs(m.frame().phi1(z));
    require(std::abs(a - 1.0) < 1e-9 || (m.has_outpost() && std::abs(a - R) < 1e-9 * R),
            ErrorCode::PreconditionViolated, "p and q must lie on C1 or C2");
    return std::abs(a - 1.0) < 1e-9 ? Curve::C1 : Curve::C2;
  };
  const Curve kp = on_curve(p), kq = on_curve(q);
  if (kp == Curve::C1 && kq == Curve::C1) {
    double diam = 0.0;
    for (int k = 0; k < 180; ++k) diam = std::max(diam, std::abs(curve_point(m, Curve::C1, kPi * k / 180) -
                                                                 curve_point(m, Curve::C1, kPi * k / 180 + kPi)));
    require(std::abs(p - q) >= opts.eta * diam, ErrorCode::PreconditionViolated, "|p - q| < eta diam C1");
  }
  SzegoEvaluator S = szego_for(m, opts.kernel_sign);
  const double spq = std::abs(S.s12(p, q));
  TheoremReport r;
  r.theorem = "scaled_correlations";
  r.n = ns;
  r.grid = "p = " + point_label(p) + ", q = " + point_label(q) + ", " + std::to_string(st_grid.size()) + " (s,t)";
  r.tolerance = 0.15;
  for (int n : ns) {
    const KernelEvaluator& K = ks.at(n);
    const double k00 = std::abs(K.kernel(p, q));
    for (const auto& [s, t] : st_grid) {
      const cplx z = zoom_point(m, p, s, n), w = zoom_point(m, q, t, n);
      const std::string st = "(" + fmt(s) + "," + fmt(t) + ")";
      if (!std::isfinite(m.Q(z)) || !std::isfinite(m.Q(w))) {
        r.notes.push_back("n = " + std::to_string(n) + ": " + st + " leaves K, skipped");
        continue;
      }
      const double kz = std::abs(K.kernel(z, w));
      const double g = std::exp(-0.5 * (s * s + t * t));
      r.deviations.push_back({"modulus " + st, n, std::abs(kz / (std::sqrt(2 * kPi * n) * spq * g) - 1.0),
                              n >= 64 ? 0.15 : kInf, true});
      if (s != 0.0 || t != 0.0)
        r.deviations.push_back({"gauss ratio " + st, n, std::abs(kz / k00 / g - 1.0), 0.1, false});
    }
  }
  if (kp != kq) r.notes.push_back("cross-curve pair");
  finalize(r);
  return r;
}

// ---------------- outpost density ----------------

DensityProfile outpost_profile(const KernelEvaluator& K, cplx p, const std::vector<double>& t_grid,
                               SignConvention mu_sign) {
  const Model& m = K.model();
  require(m.has_outpost(), ErrorCode::PreconditionViolated, "model has no outpost");
  require(std::abs(std::abs(m.frame().phi1(p)) - m.frame().ratio()) < 1e-9 * m.frame().ratio(),
          ErrorCode::PreconditionViolated, "p must lie on C2");
  const int n = K.n();
  DensityProfile out;
  out.amplitude = std::sqrt(n * curve_laplacian(m, p) / (2 * kPi)) * mu_value(m, mu_sign) *
                  std::abs(m.frame().phi2_prime(p));
  for (double t : t_grid) {
    const cplx z = zoom_point(m, p, t, n);
    if (m.region(z) != Region::N2) continue;
    out.t.push_back(t);
    out.value.push_back(K.diagonal(z));
    out.prediction.push_back(out.amplitude * std::exp(-t * t));
  }
  return out;
}

TheoremReport check_outpost_density(KernelSet& ks, const std::vector<int>& ns, cplx p,
                                    const std::vector<double>& t_grid, const VerifyOptions& opts) {
  const Model& m = ks.model();
  require(m.has_outpost(), ErrorCode::PreconditionViolated, "model has no outpost");
  require(std::abs(std::abs(m.frame().phi1(p)) - m.frame().ratio()) < 1e-9 * m.frame().ratio(),
          ErrorCode::PreconditionViolated, "p must lie on C2");
  const double mu = mu_value(m, opts.mu_sign);
  TheoremReport r;
  r.theorem = "outpost_density";
  r.n = ns;
  r.grid = "p = " + point_label(p) + ", " + std::to_string(t_grid.size()) + " t values clipped to N2";
  const int nmax = *std::max_element(ns.begin(), ns.end());
  // t values inside N2 for every n; the profile trend is taken on this common range
  std::vector<double> common;
  for (double t : t_grid) {
    bool in = true;
    for (int n : ns) in = in && m.region(zoom_point(m, p, t, n)) == Region::N2;
    if (in) common.push_back(t);
  }
  for (int n : ns) {
    const KernelEvaluator& K = ks.at(n);
    const DensityProfile pr = outpost_profile(K, p, t_grid, opts.mu_sign);
    const double amp = pr.amplitude;
    // profile over the clipped grid, and a least-squares fit of log K against t^2
    double sx = 0, sy = 0, sxx = 0, sxy = 0, tmax = 0.0, worst_common = 0.0;
    const int cnt = static_cast<int>(pr.t.size());
    for (int i = 0; i < cnt; ++i) {
      const double t = pr.t[i], kz = pr.value[i];
      const double dev = std::abs(std::log(kz / pr.prediction[i]));
      r.deviations.push_back({"profile t=" + fmt(t), n, dev, kInf, false});
      if (std::find(common.begin(), common.end(), t) != common.end()) worst_common = std::max(worst_common, dev);
      sx += t * t, sy += std::log(kz), sxx += t * t * t * t, sxy += t * t * std::log(kz);
      tmax = std::max(tmax, std::abs(t));
    }
    if (!common.empty()) r.deviations.push_back({"profile max on common t range", n, worst_common, kInf, true});
    if (cnt >= 3) {
      const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
      const double icpt = (sy - slope * sx) / cnt;
      r.deviations.push_back({"slope", n, std::abs(slope + 1.0), n == nmax ? 0.1 : kInf, false});
      r.deviations.push_back({"amplitude", n, std::abs(std::exp(icpt) / amp - 1.0), 0.25, false});
    }
    r.notes.push_back("n = " + std::to_string(n) + ": |t| <= " + fmt(tmax) + " inside N2");
    r.deviations.push_back({"belt mass / mu", n, std::abs(belt_mass(K, opts.M) / mu - 1.0), 0.25, true});
    if (m.is_radial()) {
      HeineDist hd = heine_dist(m.frame().r1(), m.frame().r2(), m.c());
      auto law = exact_count_law(m, n, neighbourhood_window(m));
      std::vector<double> he;
      double tail = 1.0;
      for (int k = 0; k < static_cast<int>(law.size()) + 40 && tail > 1e-16; ++k) {
        he.push_back(heine_pmf(hd, k));
        tail -= he.back();
      }
      r.deviations.push_back({"heine tv", n, total_variation(law, he), n >= 128 ? 0.03 : n >= 64 ? 0.05 : kInf, true});
    }
  }
  finalize(r);
  return r;
}

// ---------------- Berezin measures ----------------

namespace {

// |K_n(z,w)|^2 / K_n(z,z) dA(w) for an exterior root z, integrated over pieces of K.
class BerezinIntegrator {
 public:
  BerezinIntegrator(KernelSet& ks, int n, cplx z, const VerifyOptions& opts)
      : m_(ks.model()), K_(ks.at(n)), z_(z), opts_(opts), R_(m_.frame().ratio()),
        d_(belt_delta(n, opts.M)), dc_(belt_delta(n, opts.M_complement)), nt_(2 * n + 64) {
    require(m_.has_outpost(), ErrorCode::PreconditionViolated, "model has no outpost");
    wz_ = checked_phi1(m_, z, 0.0);
    require(m_.region(z) == Region::Outside, ErrorCode::PreconditionViolated, "Berezin root must lie off the belts");
    Vz_ = m_.V(z);
    kzz_ = K_.weighted_kernel(z, Vz_, z, Vz_).real();
    star_ = {1.0 - d_, 1.0 - dc_};
    chart_ = {1.0 + d_, 1.0 + dc_, R_ * (1 - d_), R_ * (1 + d_), R_ * (1 - dc_), R_ * (1 + dc_)};
  }

  cplx phi1_z() const { return wz_; }

  cplx mass(const std::function<bool(cplx)>& in, const std::function<cplx(cplx)>& f) const {
    return integrate_over_K(
        m_, [&](cplx w) { return in(w) ? f(w) * std::norm(K_.weighted_kernel(z_, Vz_, w, m_.Q(w))) / kzz_ : cplx(0.0); },
        nt_, opts_.panels, star_, chart_);
  }
  double total() const {
    return mass([](cplx) { return true; }, [](cplx) { return cplx(1.0); }).real();
  }
  double belt_b2() const {
    return mass([&](cplx w) { return in_belt2(w, d_); }, [](cplx) { return cplx(1.0); }).real();
  }
  // mass on the belts at M_complement
  double belts_complement() const {
    return mass(
               [&](cplx w) {
                 if (m_.region(w) == Region::N2) return in_belt2(w, dc_);
                 if (m_.region(w) == Region::N1) return std::abs(m_.frame().phi1(w)) <= 1.0 + dc_;
                 return star_u(w) >= 1.0 - dc_;
               },
               [](cplx) { return cplx(1.0); })
        .real();
  }
  // 1/phi1 on Ext C1, continued into the droplet by u conj(phi1(C1 point))
  cplx inv_phi1(cplx w) const {
    if (m_.region(w) != Region::Interior) return 1.0 / m_.frame().phi1(w);
    if (m_.is_radial()) return std::conj(w) / m_.frame().r1();
    const double u = star_u(w);
    const cplx e = m_.frame().phi1(w / u);
    return u * std::conj(e / std::abs(e));
  }

 private:
  bool in_belt2(cplx w, double d) const {
    const double a = std::abs(m_.frame().phi1(w)) / R_;
    return m_.region(w) == Region::N2 && a >= 1 - d && a <= 1 + d;
  }
  // star coordinate of an interior point: w = u b with b on C1
  double star_u(cplx w) const {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double u = 0.5 * (lo + hi);
      (m_.region(w / u) == Region::Interior ? hi : lo) = u;
    }
    return hi;
  }

  const Model& m_;
  const KernelEvaluator& K_;
  cplx z_, wz_;
  VerifyOptions opts_;
  double R_, d_, dc_;
  int nt_;
  double Vz_ = 0.0, kzz_ = 0.0;
  std::vector<double> star_, chart_;
};

}  // namespace

BerezinMass berezin_mass(KernelSet& ks, int n, cplx z, const VerifyOptions& opts) {
  BerezinIntegrator B(ks, n, z, opts);
  const Model& m = ks.model();
  BerezinMass out;
  out.z = z;
  out.n = n;
  out.r = std::abs(B.phi1_z()) / m.frame().ratio();
  out.total = B.total();
  out.belt_b2 = B.belt_b2();
  out.closed_b2 = b2_mass_closed(out.r, m.frame().r1(), m.frame().r2(), m.c(), opts.b2_sign);
  return out;
}

TheoremReport check_berezin(KernelSet& ks, int n, const std::vector<cplx>& z_list, const VerifyOptions& opts) {
  const Model& m = ks.model();
  require(m.has_outpost(), ErrorCode::PreconditionViolated, "model has no outpost");
  SzegoEvaluator S = szego_for(m, opts.kernel_sign);
  TheoremReport r;
  r.theorem = "berezin";
  r.n = {n};
  r.grid = std::to_string(z_list.size()) + " roots, M = " + fmt(opts.M);
  r.tolerance = kInf;
  for (cplx z : z_list) {
    BerezinIntegrator B(ks, n, z, opts);
    const cplx wz = B.phi1_z();
    const std::string zl = "z " + point_label(z);
    const double total = B.total();
    r.deviations.push_back({"total mass " + zl, n, std::abs(total - 1.0), 1e-8, false});
    const double b2n = B.belt_b2();
    const double rr = std::abs(wz) / m.frame().ratio();
    const double b2c = b2_mass_closed(rr, m.frame().r1(), m.frame().r2(), m.c(), opts.b2_sign);
    r.deviations.push_back({"B2 mass vs b2(1) " + zl, n, std::abs(b2n - b2c), 0.05, false});
    const double szz = S.s12(z, z).real();
    r.deviations.push_back(
        {"b2(1) closed form vs Parseval " + zl, n, std::abs(b2c - parseval_c2(S, z) / szz), 1e-9, false});
    const double comp = total - B.belts_complement();
    r.deviations.push_back({"complement mass " + zl, n, std::abs(comp), n >= 128 ? 1e-3 : kInf, false});
    auto f1 = [&](cplx w) { return B.inv_phi1(w); };
    const cplx bsum = berezin_boundary(S, z, Curve::C1, f1) + berezin_boundary(S, z, Curve::C2, f1);
    r.deviations.push_back({"reproducing 1/phi1 " + zl, n, std::abs(bsum - 1.0 / wz), 1e-8, false});
    const cplx muf = B.mass([](cplx) { return true; }, f1);
    r.deviations.push_back({"mu(1/phi1) vs b1+b2 " + zl, n, std::abs(muf - bsum), 0.05, false});
  }
  finalize(r);
  return r;
}

// ---------------- edge error function ----------------

TheoremReport check_edge_erfc(KernelSet& ks, int n, cplx p, const std::vector<double>& t_grid) {
  const Model& m = ks.model();
  require(std::abs(std::abs(m.frame().phi1(p)) - 1.0) < 1e-9, ErrorCode::PreconditionViolated, "p must lie on C1");
  const KernelEvaluator& K = ks.at(n);
  const double lap = curve_laplacian(m, p);
  TheoremReport r;
  r.theorem = "edge_erfc";
  r.n = {n};
  r.grid = "p = " + point_label(p) + ", " + std::to_string(t_grid.size()) + " t values";
  for (double t : t_grid) {
    const cplx z = zoom_point(m, p, t, n);
    const double kz = K.diagonal(z);
    const double pred = n * lap * std::erfc(t) / 2;
    const std::string lab = "t=" + fmt(t);
    if (m.region(z) == Region::N2) {
      r.notes.push_back(lab + " lands in the outpost neighbourhood, skipped");
      continue;
    }
    if (t >= 3.0)
      r.deviations.push_back({"K/n " + lab, n, kz / n, 0.01, false});
    else
      r.deviations.push_back({"ratio " + lab, n, std::abs(kz / pred - 1.0), t <= -3.0 ? 0.1 : 0.2, false});
  }
  finalize(r);
  return r;
}

// ---------------- sign arbitration ----------------

bool SignResolution::conclusive() const {
  return std::all_of(families.begin(), families.end(), [](const SignVerdict& v) { return v.verdict.has_value(); });
}

bool SignResolution::matches_defaults() const {
  for (const auto& v : families) {
    if (!v.verdict) return false;
    const SignConvention def = v.family == "kernel" ? kKernelSign : v.family == "mu" ? kMuSign : kB2Sign;
    if (*v.verdict != def) return false;
  }
  return true;
}

TheoremReport SignResolution::report() const {
  TheoremReport r;
  r.theorem = "sign_convention";
  r.grid = "kernel diagonal on C2, belt mass vs mu, Berezin C2 mass";
  for (const auto& v : families) {
    const double best = std::min(v.err_minus, v.err_plus), other = std::max(v.err_minus, v.err_plus);
    // the winning sign must beat the other by a factor 2
    r.deviations.push_back({v.family + " winner/loser error", 0, other > 0 ? best / other : 1.0, 0.5, false});
    r.notes.push_back(v.family + ": " + (v.verdict ? sign_name(*v.verdict) : "inconclusive") +
                      " (err minus_c " + fmt(v.err_minus) + ", plus_c " + fmt(v.err_plus) + ")");
  }
  finalize(r);
  r.pass = r.pass && matches_defaults();
  return r;
}

SignResolution resolve_sign_convention(KernelSet& ks, int n, bool strict) {
  const Model& m = ks.model();
  require(m.is_radial() && m.has_outpost(), ErrorCode::PreconditionViolated,
          "sign arbitration needs a rotation-invariant model with an outpost");
  SignResolution out;
  auto decide = [](SignVerdict v) {
    if (v.err_minus * 2 <= v.err_plus) v.verdict = SignConvention::MinusC;
    if (v.err_plus * 2 <= v.err_minus) v.verdict = SignConvention::PlusC;
    return v;
  };
  const KernelEvaluator& K = ks.at(n);
  const KernelEvaluator& K2 = ks.at(2 * n);
  const cplx p = curve_point(m, Curve::C2, 0.0);
  {
    // kernel weights: K_n(p,p) / sqrt(2 pi n) against S12(p,p), averaged over n and 2n
    SignVerdict v{"kernel", 0.0, 0.0, std::nullopt};
    for (SignConvention s : {SignConvention::MinusC, SignConvention::PlusC}) {
      const double pred = szego_for(m, s).s12(p, p).real();
      double e = 0.0;
      for (const KernelEvaluator* k : {&K, &K2})
        e += std::abs(k->diagonal(p) / std::sqrt(2 * kPi * k->n()) / pred - 1.0) / 2;
      (s == SignConvention::MinusC ? v.err_minus : v.err_plus) = e;
    }
    out.families.push_back(decide(v));
  }
  {
    SignVerdict v{"mu", 0.0, 0.0, std::nullopt};
    const double ey = belt_mass(K, 3.0);
    v.err_minus = std::abs(ey / mu_value(m, SignConvention::MinusC) - 1.0);
    v.err_plus = std::abs(ey / mu_value(m, SignConvention::PlusC) - 1.0);
    out.families.push_back(decide(v));
  }
  {
    SignVerdict v{"b2", 0.0, 0.0, std::nullopt};
    const double R = m.frame().ratio();
    const cplx z = m.frame().map().f(2.0 * R);
    const double d = belt_delta(n, 3.0);
    const double Vz = m.V(z);
    const double kzz = K.weighted_kernel(z, Vz, z, Vz).real();
    // rotation invariance: the w-angle integral of |K(z,w)|^2 needs 2n nodes
    const double b2n =
        integrate_over_K(
            m,
            [&](cplx w) {
              const double a = std::abs(m.frame().phi1(w)) / R;
              const bool in = m.region(w) == Region::N2 && a >= 1 - d && a <= 1 + d;
              return in ? cplx(std::norm(K.weighted_kernel(z, Vz, w, m.Q(w))) / kzz) : cplx(0.0);
            },
            2 * n + 64, 8, {}, {R * (1 - d), R * (1 + d)})
            .real();
    v.err_minus = std::abs(b2n - b2_mass_closed(2.0, m.frame().r1(), m.frame().r2(), m.c(), SignConvention::MinusC));
    v.err_plus = std::abs(b2n - b2_mass_closed(2.0, m.frame().r1(), m.frame().r2(), m.c(), SignConvention::PlusC));
    out.families.push_back(decide(v));
  }
  if (strict && !out.conclusive()) fail(ErrorCode::Inconclusive, "a sign family has no clear verdict");
  return out;
}

// ---------------- batch ----------------

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"szego_convergence", "far_exterior", "scaled_correlations",
                                              "outpost_density",   "berezin",      "edge_erfc"};
  return names;
}

std::vector<TheoremReport> run_checks(KernelSet& ks, const std::vector<int>& ns, const std::vector<std::string>& names,
                                      const VerifyOptions& opts) {
  require(!ns.empty(), ErrorCode::InvalidParameter, "no n given");
  for (const auto& name : names)
    require(std::find(check_names().begin(), check_names().end(), name) != check_names().end(),
            ErrorCode::ConfigError, "unknown check '" + name + "'");
  auto wanted = [&](const char* name) { return std::find(names.begin(), names.end(), name) != names.end(); };
  const Model& m = ks.model();
  std::vector<TheoremReport> out;
  if (wanted("szego_convergence")) out.push_back(check_szego_convergence(ks, ns, default_szego_pairs(m), opts));
  if (!m.has_outpost()) return out;
  const int nmax = *std::max_element(ns.begin(), ns.end());
  const int nmin = *std::min_element(ns.begin(), ns.end());
  if (wanted("far_exterior")) out.push_back(check_far_exterior(ks, nmin, opts));
  const cplx p = curve_point(m, Curve::C2, 0.0), q = curve_point(m, Curve::C2, kPi);
  if (wanted("scaled_correlations")) {
    out.push_back(check_scaled_correlations(ks, ns, p, q, {{0.0, 0.0}, {1.0, 1.0}}, opts));
    out.push_back(check_scaled_correlations(ks, ns, curve_point(m, Curve::C1, kPi / 2), p, {{0.0, 0.0}}, opts));
  }
  if (wanted("outpost_density")) {
    std::vector<double> tg;
    for (int k = -20; k <= 20; ++k) tg.push_back(0.1 * k);
    out.push_back(check_outpost_density(ks, ns, p, tg, opts));
  }
  if (wanted("berezin"))
    for (int n : ns) out.push_back(check_berezin(ks, n, {m.frame().map().f(2.0 * m.frame().ratio())}, opts));
  if (wanted("edge_erfc")) out.push_back(check_edge_erfc(ks, nmax, curve_point(m, Curve::C1, 0.0), {-3.0, 0.0, 3.0}));
  return out;
}

std::vector<TheoremReport> run_all_checks(KernelSet& ks, const std::vector<int>& ns, const VerifyOptions& opts) {
  return run_checks(ks, ns, check_names(), opts);
}

}  // namespace outpost
