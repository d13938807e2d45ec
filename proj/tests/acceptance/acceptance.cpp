// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "outpost/sampler.hpp"
#include "outpost/verify.hpp"

using namespace outpost;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

int failures = 0;

void criterion(const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("threw ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.str().c_str());
  std::fflush(stdout);
}

const Deviation* find(const TheoremReport& r, const std::string& label, int n) {
  for (const auto& d : r.deviations)
    if (d.label == label && d.n == n) return &d;
  return nullptr;
}

double value(const TheoremReport& r, const std::string& label, int n) {
  const Deviation* d = find(r, label, n);
  require(d != nullptr, ErrorCode::PreconditionViolated, "report " + r.theorem + " has no '" + label + "'");
  return d->value;
}

KernelSet& radial_set() {
  static KernelSet ks(build_radial_model(1.25, 1.0));
  return ks;
}

KernelSet& radial_c1_set() {
  static KernelSet ks(build_radial_model(1.5, std::exp(2.0)));
  return ks;
}

std::vector<double> t_grid() {
  std::vector<double> tg;
  for (int k = -20; k <= 20; ++k) tg.push_back(0.1 * k);
  return tg;
}

const TheoremReport& density_report() {
  static const TheoremReport r = [] {
    const Model& m = radial_set().model();
    return check_outpost_density(radial_set(), {32, 64, 128}, curve_point(m, Curve::C2, 0.0), t_grid());
  }();
  return r;
}

}  // namespace

int main() {
  criterion("exact kernel sanity", [](Outcome& o) {
    const Model gin = build_ginibre_model();
    const KernelEvaluator K50 = KernelEvaluator::build(gin, 50);
    o.require(std::abs(K50.diagonal(0.0) / 50 - 1.0) <= 1e-10, "Ginibre K50(0,0) = " + g(K50.diagonal(0.0)));
    struct Case {
      const char* name;
      Model m;
      int n;
    };
    std::vector<Case> cases;
    cases.push_back({"ginibre", gin, 50});
    cases.push_back({"radial", build_radial_model(1.25, 1.0), 64});
    cases.push_back({"radial c=1", build_radial_model(1.5, std::exp(2.0)), 64});
    cases.push_back(
        {"radial smooth gap", build_model({ModelKind::RadialOutpost, 0.0, 1.0, 1.5, 1.0, GapFill::Smooth}), 32});
    cases.push_back({"quadrature domain", build_quadrature_domain_model(-0.5, 0.735, 1.0, 1.0), 24});
    cases.push_back({"elliptic", build_elliptic_ginibre_model(0.3, 1.0, 1.8, 1.0), 12});
    for (const auto& c : cases) {
      const KernelEvaluator K = KernelEvaluator::build(c.m, c.n);
      const double t = K.trace();
      o.require(std::abs(t - c.n) <= 1e-8 * c.n, std::string(c.name) + " trace/n - 1 = " + g(t / c.n - 1.0));
    }
  });

  criterion("Szego kernel representations and reproducing property", [](Outcome& o) {
    std::vector<std::pair<const char*, Model>> models;
    models.emplace_back("radial c=1", build_radial_model(1.5, std::exp(2.0)));
    models.emplace_back("quadrature domain", build_quadrature_domain_model(-0.5, 0.735, 1.0, 1.0));
    models.emplace_back("elliptic", build_elliptic_ginibre_model(0.4, 1.0, 1.5, 2.0));
    for (const auto& [name, m] : models) {
      SzegoEvaluator S(m);
      const auto& fr = m.frame();
      const double R = fr.ratio();
      double worst = 0.0;
      // outside C2 all four forms converge
      for (int i = 0; i < 8; ++i) {
        const cplx z = fr.map().f(std::polar(1.2 * R, 0.4 * i)), w = fr.map().f(std::polar(1.2 * R, 1.3 - 0.7 * i));
        const cplx reps[] = {S.s12(z, w, Representation::Form11), S.s12(z, w, Representation::Form22),
                             S.s12(z, w, Representation::Form12), S.s12(z, w, Representation::Extend)};
        for (const cplx& a : reps)
          for (const cplx& b : reps) worst = std::max(worst, std::abs(a - b));
      }
      // between the curves the C1-centred form and the extension overlap
      for (double rho : {1.06, 1.1, 1.3}) {
        const cplx z = fr.map().f(std::polar(rho, 0.2)), w = fr.map().f(std::polar(rho, 0.9));
        worst = std::max(worst, std::abs(S.s12(z, w, Representation::Form11) - S.s12(z, w, Representation::Extend)));
      }
      o.require(worst <= 1e-10, std::string(name) + " representations " + g(worst));
      double rep = 0.0;
      for (cplx z : {fr.map().f(std::polar(1.5 * R, 0.3)), fr.map().f(std::polar(0.5 * (1 + R), 2.0)),
                     fr.map().f(std::polar(3.0 * R, -1.1))})
        for (int k = 1; k <= 3; ++k) {
          auto f = [&fr, k](cplx q) { return std::pow(fr.phi1(q), -k); };
          const cplx b = berezin_boundary(S, z, Curve::C1, f) + berezin_boundary(S, z, Curve::C2, f);
          rep = std::max(rep, std::abs(b - f(z)));
        }
      o.require(rep <= 1e-8, std::string(name) + " reproducing " + g(rep));
    }
  });

  criterion("Heine law of the outpost count", [](Outcome& o) {
    const TheoremReport& r = density_report();
    const double t64 = value(r, "heine tv", 64), t128 = value(r, "heine tv", 128);
    o.require(t64 <= 0.05, "TV(64) = " + g(t64));
    o.require(t128 <= 0.03, "TV(128) = " + g(t128));
    o.require(t128 < t64, "monotone");
  });

  criterion("expected number of outliers", [](Outcome& o) {
    const TheoremReport& r = density_report();
    const double e64 = value(r, "belt mass / mu", 64), e128 = value(r, "belt mass / mu", 128);
    o.require(e64 <= 0.25, "|E Y / mu - 1| at 64 = " + g(e64));
    o.require(e128 < e64, "at 128 = " + g(e128));
  });

  criterion("exterior kernel modulus ratio", [](Outcome& o) {
    const auto pairs = default_szego_pairs(radial_set().model());
    o.require(pairs.size() == 10, std::to_string(pairs.size()) + " pairs");
    const TheoremReport r = check_szego_convergence(radial_set(), {32, 64, 128}, pairs);
    std::map<int, double> mx;
    for (const auto& d : r.deviations) mx[d.n] = std::max(mx[d.n], d.value);
    o.require(mx[64] < mx[32] && mx[128] < mx[64],
              "max |R-1| = " + g(mx[32]) + ", " + g(mx[64]) + ", " + g(mx[128]));
    o.require(r.exponent_fit && *r.exponent_fit > 0, "exponent " + (r.exponent_fit ? g(*r.exponent_fit) : "none"));
  });

  criterion("outpost density profile", [](Outcome& o) {
    const TheoremReport& r = density_report();
    const double s = value(r, "slope", 128), a = value(r, "amplitude", 128);
    o.require(s <= 0.1, "|slope + 1| = " + g(s));
    o.require(a <= 0.25, "amplitude error " + g(a));
  });

  criterion("Berezin measures", [](Outcome& o) {
    const Model& m = radial_set().model();
    const cplx z = m.frame().map().f(2.0 * m.frame().ratio());
    const TheoremReport r = check_berezin(radial_set(), 64, {z});
    const std::string zl = " z (2.5,0)";
    const double tot = value(r, "total mass" + zl, 64), b2 = value(r, "B2 mass vs b2(1)" + zl, 64),
                 pv = value(r, "b2(1) closed form vs Parseval" + zl, 64);
    o.require(tot <= 1e-8, "total mass " + g(tot));
    o.require(b2 <= 0.05, "|mu(B2) - b2(1)| = " + g(b2));
    o.require(pv <= 1e-9, "closed form vs Parseval " + g(pv));
  });

  criterion("approximant quality with one calibrated constant", [](Outcome& o) {
    const Model& m = radial_set().model();
    double cE[2] = {0, 0}, cF[2] = {0, 0};
    int idx = 0;
    for (int n : {64, 128}) {
      const KernelEvaluator& K = radial_set().at(n);
      const double ln = std::log(static_cast<double>(n));
      const int jE = n - static_cast<int>(std::ceil(ln * ln)), jF = n - 2;
      TauFamily tau(m, static_cast<double>(jE) / n);
      for (int i = 0; i < 40; ++i) {
        const double r = 1.005 + (1.25 * (1 + m.width()) - 1.01) * i / 39.0;
        const cplx z = std::polar(r, 0.31 * i);
        if (!m.in_K(z)) continue;
        const auto e = K.wavefunctions(z);
        cE[idx] = std::max(cE[idx], std::abs(e[jE] - approximant_E(m, tau, jE, n, z)) / edge_envelope(m, tau, n, z));
        cF[idx] = std::max(cF[idx], std::abs(e[jF] - approximant_F(m, jF, n, z)) / bifurcation_envelope(m, n, z));
      }
      ++idx;
    }
    o.require(cE[1] <= cE[0], "E: C(64) = " + g(cE[0]) + ", C(128) = " + g(cE[1]));
    o.require(cF[1] <= cF[0], "F: C(64) = " + g(cF[0]) + ", C(128) = " + g(cF[1]));
  });

  criterion("sampler unbiasedness", [](Outcome& o) {
    const Model& m = radial_set().model();
    const double R = m.frame().ratio();
    {
      const int n = 32;
      const KernelEvaluator& K = radial_set().at(n);
      SampleConfig cfg;
      cfg.n_samples = 2000;
      cfg.seed = 3;
      const auto s = DppSampler(K, cfg).draw_all();
      for (CountWindow W : {belt_window(m, n), neighbourhood_window(m), CountWindow{0.9 / R, 1.0 / R}}) {
        const OutlierStats st = outlier_stats(s, m, W);
        const double expect = annulus_mass(K, W.lo * R, W.hi * R);
        const double se = std::sqrt(std::max(st.variance, 1e-4) / st.n_samples);
        o.require(std::abs(st.mean - expect) <= 3 * se,
                  "window [" + g(W.lo) + "," + g(W.hi) + "] z = " + g((st.mean - expect) / se));
      }
    }
    {
      // one-point marginal on radial shells: droplet disk, N1, N2
      const int n = 16;
      const double w = m.width();
      std::vector<double> e;
      for (int k = 0; k <= 8; ++k) e.push_back((1.0 + w) * k / 8.0);
      for (double x : {R * (1 - w), R, R * (1 + w)}) e.push_back(x);
      auto hist = [&](const std::vector<std::vector<cplx>>& samples) {
        std::vector<double> h(e.size() - 1, 0.0);
        double total = 0;
        for (const auto& s : samples)
          for (cplx z : s) {
            const auto it = std::upper_bound(e.begin(), e.end(), std::abs(z));
            if (it != e.begin() && it != e.end()) h[it - e.begin() - 1] += 1;
            total += 1;
          }
        for (auto& x : h) x /= total;
        return h;
      };
      McmcConfig mc;
      mc.steps = 16L * 40000;
      mc.burn_in = 40000;
      mc.seed = 21;
      const auto hm = hist(sample_gibbs_mcmc(m, n, mc).samples);
      SampleConfig cfg;
      cfg.n_samples = 2000;
      cfg.seed = 9;
      std::vector<std::vector<cplx>> pts;
      for (auto& s : DppSampler(radial_set().at(n), cfg).draw_all()) pts.push_back(s.points);
      const double tv = total_variation(hist(pts), hm);
      o.require(tv <= 0.05, "DPP vs MCMC shell TV at n = 16: " + g(tv));
    }
  });

  criterion("sign arbitration", [](Outcome& o) {
    const SignResolution s = resolve_sign_convention(radial_c1_set(), 64, false);
    o.require(s.conclusive(), "conclusive");
    o.require(s.matches_defaults(), "matches shipped defaults");
    for (const auto& v : s.families) o.detail << "; " << v.family << " " << g(v.err_minus) << "/" << g(v.err_plus);
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
