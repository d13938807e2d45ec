#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>

#include "doctest.h"
#include "outpost/sampler.hpp"
#include "outpost/szego.hpp"

using namespace outpost;

namespace {

const Model& radial() {
  static const Model m = build_radial_model(1.25, 1.0);
  return m;
}

const KernelEvaluator& radial_kernel(int n) {
  static std::map<int, KernelEvaluator> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, KernelEvaluator::build(radial(), n)).first;
  return it->second;
}

// Radial shells in |z|: edges of the droplet disk, N1 and N2.
std::vector<double> shell_edges(const Model& m) {
  const double w = m.width(), R = m.frame().ratio();
  std::vector<double> e;
  for (int k = 0; k <= 8; ++k) e.push_back((1.0 + w) * k / 8.0);
  e.push_back(R * (1 - w));
  e.push_back(R);
  e.push_back(R * (1 + w));
  return e;
}

std::vector<double> shell_histogram(const std::vector<std::vector<cplx>>& samples, const std::vector<double>& e) {
  std::vector<double> h(e.size() - 1, 0.0);
  double total = 0.0;
  for (const auto& s : samples)
    for (cplx z : s) {
      const double r = std::abs(z);
      for (size_t k = 0; k + 1 < e.size(); ++k)
        if (r >= e[k] && r < e[k + 1]) {
          h[k] += 1;
          break;
        }
      total += 1;
    }
  for (auto& x : h) x /= total;
  return h;
}

std::vector<double> shell_exact(const KernelEvaluator& K, const std::vector<double>& e) {
  std::vector<double> p;
  for (size_t k = 0; k + 1 < e.size(); ++k) p.push_back(annulus_mass(K, std::max(e[k], 1e-12), e[k + 1]) / K.n());
  return p;
}

std::vector<std::vector<cplx>> points_of(const std::vector<Sample>& s) {
  std::vector<std::vector<cplx>> out;
  for (const auto& x : s) out.push_back(x.points);
  return out;
}

int total_violations(const std::vector<Sample>& s) {
  int v = 0;
  for (const auto& x : s) v += x.envelope_violations;
  return v;
}

}  // namespace

TEST_CASE("Poisson-binomial law") {
  auto f = poisson_binomial({0.5, 0.5});
  REQUIRE(f.size() == 3);
  CHECK(f[0] == doctest::Approx(0.25));
  CHECK(f[1] == doctest::Approx(0.5));
  CHECK(f[2] == doctest::Approx(0.25));
  auto g = poisson_binomial({0.1, 0.7, 0.3});
  double s = 0.0, mean = 0.0;
  for (size_t k = 0; k < g.size(); ++k) s += g[k], mean += k * g[k];
  CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mean == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(g[3] == doctest::Approx(0.1 * 0.7 * 0.3));
  CHECK(total_variation({1.0}, {0.5, 0.5}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(poisson_binomial({1.5}), Error);
}

TEST_CASE("counting windows") {
  const Model& m = radial();
  const double w = m.width();
  auto N = neighbourhood_window(m);
  CHECK(N.lo == doctest::Approx(1 - w));
  CHECK(N.hi == doctest::Approx(1 + w));
  auto B = belt_window(m, 64);
  CHECK(B.hi - 1 == doctest::Approx(std::min(w, 3 * std::sqrt(std::log(64.0) / 64))));
  CHECK(N.contains(m, 1.25));
  CHECK_FALSE(N.contains(m, 0.5));
  CHECK_FALSE(N.contains(m, 1.25 * (1 + 1.5 * w)));
}

TEST_CASE("statistics are invariant under permutation of the points") {
  const Model& m = radial();
  std::vector<std::vector<cplx>> a{{0.1, 1.25, cplx(0, 1.3)}, {1.2, 0.3, 0.0}};
  auto b = a;
  for (auto& s : b) std::reverse(s.begin(), s.end());
  auto W = neighbourhood_window(m);
  auto sa = outlier_stats(a, m, W), sb = outlier_stats(b, m, W);
  CHECK(sa.histogram == sb.histogram);
  CHECK(sa.mean == sb.mean);
  CHECK(sa.histogram[2] == 1);
  CHECK(sa.histogram[1] == 1);
  long long tot = 0;
  for (auto h : sa.histogram) tot += h;
  CHECK(tot == sa.n_samples);
}

TEST_CASE("DPP sampler: n = 1 Ginibre is radially Gaussian") {
  Model g = build_ginibre_model();
  KernelEvaluator K = KernelEvaluator::build(g, 1);
  SampleConfig cfg;
  cfg.n_samples = 10000;
  cfg.seed = 11;
  auto s = DppSampler(K, cfg).draw_all();
  std::vector<double> r;
  for (const auto& x : s) r.push_back(std::abs(x.points.at(0)));
  const double rmax = K.basis().cutoff_radius;
  const double norm = 1 - std::exp(-rmax * rmax);
  const double ks = ks_distance(r, [&](double x) { return (1 - std::exp(-x * x)) / norm; });
  CHECK(ks <= 0.02);
  CHECK(total_violations(s) == 0);
}

TEST_CASE("DPP sampler: deterministic per seed and index") {
  const KernelEvaluator& K = radial_kernel(16);
  SampleConfig cfg;
  cfg.n_samples = 4;
  cfg.seed = 7;
  DppSampler S(K, cfg);
  auto all = S.draw_all();
  for (int i = 0; i < 4; ++i) CHECK(all[i].points == S.draw(i).points);
  CHECK(all[0].points != all[1].points);
  cfg.seed = 8;
  CHECK(DppSampler(K, cfg).draw(0).points != all[0].points);
  CHECK(sample_dpp(K, cfg, 3) == DppSampler(K, cfg).draw(3).points);
  CHECK(all[0].points.size() == 16);
}

TEST_CASE("DPP sampler: envelope dominates the diagonal") {
  const KernelEvaluator& K = radial_kernel(16);
  DppSampler S(K, {});
  auto patches = radial().patches();
  for (size_t p = 0; p < patches.size(); ++p)
    for (int a = 0; a <= 40; ++a) {
      const double u = patches[p].u0 + (patches[p].u1 - patches[p].u0) * a / 40.0;
      for (double th : {0.0, 1.0, 4.0}) {
        PatchPoint pp = radial().patch_point(patches[p], u, th);
        CHECK(K.diagonal(pp.z) * pp.jacobian <= S.envelope_at(static_cast<int>(p), u, th));
      }
    }
}

TEST_CASE("DPP sampler: window counts match the integrated kernel") {
  const Model& m = radial();
  const int n = 32;
  const KernelEvaluator& K = radial_kernel(n);
  SampleConfig cfg;
  cfg.n_samples = 2000;
  cfg.seed = 3;
  auto s = DppSampler(K, cfg).draw_all();
  CHECK(total_violations(s) == 0);
  const double R = m.frame().ratio();
  for (CountWindow W : {belt_window(m, n), neighbourhood_window(m), CountWindow{0.9 / R, 1.0 / R}}) {
    auto st = outlier_stats(s, m, W);
    const double expect = annulus_mass(K, W.lo * R, W.hi * R);
    const double se = std::sqrt(std::max(st.variance, 1e-4) / st.n_samples);
    CAPTURE(W.lo);
    CAPTURE(expect);
    CAPTURE(st.mean);
    CHECK(std::abs(st.mean - expect) <= 3 * se);
  }
  // same integral from the moment split
  auto B = belt_window(m, n);
  double sh = 0.0;
  for (double p : radial_annulus_shares(m, n, B.lo * m.frame().r2(), B.hi * m.frame().r2())) sh += p;
  CHECK(sh == doctest::Approx(annulus_mass(K, B.lo * R, B.hi * R)).epsilon(1e-8));
}

TEST_CASE("DPP sampler: law of the outpost count matches the exact finite-n law") {
  const Model& m = radial();
  const int n = 32;
  const KernelEvaluator& K = radial_kernel(n);
  SampleConfig cfg;
  cfg.n_samples = 4000;
  cfg.seed = 5;
  auto s = DppSampler(K, cfg).draw_all();
  auto W = neighbourhood_window(m);
  auto st = outlier_stats(s, m, W);
  auto exact = exact_count_law(m, n, W);
  CHECK(total_variation(st.pmf(), exact) <= 0.03);
}

TEST_CASE("zero-outpost control") {
  Model m = build_radial_model(1.25, 1.0, false);
  KernelEvaluator K = KernelEvaluator::build(m, 16);
  SampleConfig cfg;
  cfg.n_samples = 200;
  auto s = DppSampler(K, cfg).draw_all();
  auto st = outlier_stats(s, m, neighbourhood_window(m));
  CHECK(st.histogram.size() == 1);
  CHECK(st.histogram[0] == 200);
  McmcConfig mc;
  mc.steps = 20000;
  mc.burn_in = 2000;
  auto r = sample_gibbs_mcmc(m, 16, mc);
  CHECK(outlier_stats(r.samples, m, neighbourhood_window(m)).mean == 0.0);
}

TEST_CASE("MCMC oracle: one-point marginal on radial shells, n = 16") {
  const Model& m = radial();
  const int n = 16;
  McmcConfig mc;
  mc.steps = 16L * 40000;
  mc.burn_in = 40000;
  mc.seed = 21;
  auto r = sample_gibbs_mcmc(m, n, mc);
  CHECK(r.infinite_visits == 0);
  for (const auto& s : r.samples)
    for (cplx z : s) REQUIRE(std::isfinite(m.Q(z)));
  CHECK(r.acceptance > 0.1);
  auto e = shell_edges(m);
  auto exact = shell_exact(radial_kernel(n), e);
  double tot = 0;
  for (double p : exact) tot += p;
  CHECK(tot == doctest::Approx(1.0).epsilon(1e-6));
  auto hm = shell_histogram(r.samples, e);
  CHECK(total_variation(hm, exact) <= 0.05);

  SampleConfig cfg;
  cfg.n_samples = 2000;
  cfg.seed = 9;
  auto s = DppSampler(radial_kernel(n), cfg).draw_all();
  auto hd = shell_histogram(points_of(s), e);
  CHECK(total_variation(hd, exact) <= 0.05);
  CHECK(total_variation(hd, hm) <= 0.05);
}

TEST_CASE("MCMC oracle vs DPP: outpost count histograms, n = 32") {
  const Model& m = radial();
  const int n = 32;
  auto W = neighbourhood_window(m);
  SampleConfig cfg;
  cfg.n_samples = 2000;
  cfg.seed = 13;
  auto hd = outlier_stats(DppSampler(radial_kernel(n), cfg).draw_all(), m, W).histogram;
  McmcConfig mc;
  mc.thin = 20;
  mc.steps = 2000L * mc.thin * n;
  mc.burn_in = 50000;
  mc.seed = 17;
  auto hm = outlier_stats(sample_gibbs_mcmc(m, n, mc).samples, m, W).histogram;
  const size_t K = std::max(hd.size(), hm.size());
  hd.resize(K, 0);
  hm.resize(K, 0);
  // two-sample chi-square, tail bins merged until each expected count is at least 5
  std::vector<double> a, b;
  double ca = 0, cb = 0;
  for (size_t k = 0; k < K; ++k) {
    ca += hd[k];
    cb += hm[k];
    if ((ca + cb) / 2 >= 5 || k + 1 == K) {
      a.push_back(ca);
      b.push_back(cb);
      ca = cb = 0;
    }
  }
  if (a.size() > 1 && (a.back() + b.back()) / 2 < 5) {
    a[a.size() - 2] += a.back();
    b[b.size() - 2] += b.back();
    a.pop_back();
    b.pop_back();
  }
  REQUIRE(a.size() >= 2);
  double Na = 0, Nb = 0;
  for (size_t k = 0; k < a.size(); ++k) Na += a[k], Nb += b[k];
  double chi = 0;
  for (size_t k = 0; k < a.size(); ++k) {
    const double tot = a[k] + b[k];
    const double ea = tot * Na / (Na + Nb), eb = tot * Nb / (Na + Nb);
    chi += (a[k] - ea) * (a[k] - ea) / ea + (b[k] - eb) * (b[k] - eb) / eb;
  }
  boost::math::chi_squared dist(static_cast<double>(a.size() - 1));
  const double p = boost::math::cdf(boost::math::complement(dist, chi));
  CAPTURE(chi);
  CHECK(p > 0.01);
}

TEST_CASE("mean outpost count tracks mu") {
  const Model& m = radial();
  SzegoParams sp;
  sp.r1 = m.frame().r1();
  sp.r2 = m.frame().r2();
  sp.c = m.c();
  const double mu = heine_mean(sp);
  auto exact_mean = [&](int n) {
    double mean = 0;
    auto law = exact_count_law(m, n, belt_window(m, n));
    for (size_t k = 0; k < law.size(); ++k) mean += k * law[k];
    return mean;
  };
  const double e64 = exact_mean(64), e128 = exact_mean(128);
  CAPTURE(mu);
  CAPTURE(e64);
  CAPTURE(e128);
  CHECK(std::abs(e64 - mu) / mu <= 0.25);
  CHECK(std::abs(e128 - mu) < std::abs(e64 - mu));
  // sampled Y_n at n = 64 against the exact finite-n mean
  SampleConfig cfg;
  cfg.n_samples = 1000;
  cfg.seed = 4;
  auto st = outlier_stats(DppSampler(radial_kernel(64), cfg).draw_all(), m, belt_window(m, 64));
  CHECK(std::abs(st.mean - e64) <= 3 * std::sqrt(st.variance / st.n_samples));
}
