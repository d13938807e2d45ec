#include <cmath>

#include "doctest.h"
#include "outpost/verify.hpp"

using namespace outpost;

namespace {

KernelSet& radial_set() {
  static KernelSet ks(build_radial_model(1.25, 1.0));
  return ks;
}

KernelSet& radial_c1_set() {
  static KernelSet ks(build_radial_model(1.5, std::exp(2.0)));
  return ks;
}

const std::vector<int> kNs{32, 64, 128};

const Deviation& find(const TheoremReport& r, const std::string& label, int n) {
  for (const auto& d : r.deviations)
    if (d.label == label && d.n == n) return d;
  FAIL("missing deviation " << label << " at n = " << n);
  return r.deviations.front();
}

}  // namespace

TEST_CASE("report pass flag is a function of the deviations") {
  TheoremReport r;
  r.tolerance = 0.5;
  r.deviations = {{"a", 32, 0.4, kInf, true}, {"a", 64, 0.2, kInf, true}, {"b", 64, 0.01, 0.1, false}};
  finalize(r);
  CHECK(r.pass);
  CHECK(r.max_deviation == doctest::Approx(0.2));
  REQUIRE(r.exponent_fit);
  CHECK(*r.exponent_fit == doctest::Approx(1.0));
  CHECK(r.n == std::vector<int>{32, 64});

  auto bad = r;
  bad.deviations[1].value = 0.35;
  finalize(bad);
  CHECK(bad.pass);
  bad.deviations[1].value = 0.41;
  bad.deviations[0].value = 0.3;  // growth with n
  finalize(bad);
  CHECK_FALSE(bad.pass);
  bad.deviations[1].floor = 0.5;  // growth below the floor is tolerated
  finalize(bad);
  CHECK(bad.pass);

  auto over = r;
  over.deviations[2].value = 0.2;
  finalize(over);
  CHECK_FALSE(over.pass);
  over.deviations[2].value = std::nan("");
  finalize(over);
  CHECK_FALSE(over.pass);

  auto tol = r;
  tol.tolerance = 0.1;
  finalize(tol);
  CHECK_FALSE(tol.pass);

  TheoremReport ex;
  ex.require_positive_exponent = true;
  ex.deviations = {{"a", 32, 0.2, kInf, true}, {"c", 64, 0.3, kInf, true}};
  finalize(ex);
  REQUIRE(ex.exponent_fit);
  CHECK(*ex.exponent_fit < 0);
  CHECK_FALSE(ex.pass);
  ex.require_positive_exponent = false;
  finalize(ex);
  CHECK(ex.pass);
}

TEST_CASE("integration over K reproduces the trace") {
  for (KernelSet* ks : {&radial_set(), &radial_c1_set()}) {
    const auto& K = ks->at(32);
    const double t = integrate_over_K(ks->model(), [&](cplx z) { return cplx(K.diagonal(z)); }, 64, 8).real();
    CHECK(std::abs(t - 32) <= 1e-8 * 32);
  }
  KernelSet el(build_elliptic_ginibre_model(0.3, 1.0, 1.8, 1.0));
  const auto& K = el.at(8);
  const double t = integrate_over_K(el.model(), [&](cplx z) { return cplx(K.diagonal(z)); }, 2 * 8 + 64, 8).real();
  CHECK(std::abs(t - 8) <= 1e-8 * 8);
}

TEST_CASE("zoom geometry") {
  const Model& m = radial_set().model();
  const cplx p = curve_point(m, Curve::C2, 0.0);
  CHECK(std::abs(p - 1.25) <= 1e-12);
  CHECK(std::abs(exterior_normal(m, p) - 1.0) <= 1e-12);
  CHECK(std::abs(zoom_point(m, p, 1.0, 50) - (p + 1.0 / std::sqrt(100 * curve_laplacian(m, p)))) <= 1e-12);
  CHECK(curve_laplacian(m, curve_point(m, Curve::C1, 0.3)) == doctest::Approx(m.droplet_laplacian()));
  CHECK(belt_delta(64, 3) == doctest::Approx(3 * std::sqrt(std::log(64.0) / 64)));
}

TEST_CASE("exterior Szego-type convergence of the kernel modulus") {
  auto r = check_szego_convergence(radial_set(), kNs, default_szego_pairs(radial_set().model()));
  CHECK(r.pass);
  REQUIRE(r.exponent_fit);
  CHECK(*r.exponent_fit > 0);
  CHECK(r.deviations.size() == 30);
  // the named pair: 1.1 r2 and 1.2 r2 e^{i pi/3}, monotone in n
  const std::string lab = r.deviations.front().label;
  CHECK(find(r, lab, 64).value < find(r, lab, 32).value);
  CHECK(find(r, lab, 128).value < find(r, lab, 64).value);
}

TEST_CASE("Ginibre control against the plain Szego kernel") {
  KernelSet g(build_ginibre_model());
  auto r = check_szego_convergence(g, kNs, default_szego_pairs(g.model()));
  CHECK(r.pass);
  CHECK(r.theorem == "szego_convergence_ginibre_control");
}

TEST_CASE("Szego convergence preconditions") {
  const Model& m = radial_set().model();
  const cplx z = m.frame().map().f(std::polar(1.05, 0.0));
  CHECK_THROWS_WITH_AS(check_szego_convergence(radial_set(), {32}, {{z, z}}), doctest::Contains("eta"), Error);
  CHECK_THROWS_AS(check_szego_convergence(radial_set(), {32}, {{0.1, z}}), Error);
}

TEST_CASE("far exterior kernel decay") {
  auto r = check_far_exterior(radial_set(), 64);
  CHECK(r.pass);
  CHECK(r.tolerance == doctest::Approx(std::pow(64.0, -5)));
}

TEST_CASE("scaled correlations near the outpost") {
  const Model& m = radial_set().model();
  const cplx p = curve_point(m, Curve::C2, 0.0), q = curve_point(m, Curve::C2, kPi);
  auto r = check_scaled_correlations(radial_set(), {64, 128}, p, q, {{0.0, 0.0}, {1.0, 1.0}});
  CHECK(r.pass);
  CHECK(find(r, "modulus (0,0)", 64).value <= 0.15);
  CHECK(find(r, "modulus (0,0)", 128).value < find(r, "modulus (0,0)", 64).value);
  CHECK(find(r, "gauss ratio (1,1)", 64).value <= 0.1);

  // cross-curve: nonzero, and the C1-C2 series gives the same magnitude
  const cplx p1 = curve_point(m, Curve::C1, kPi / 2);
  auto x = check_scaled_correlations(radial_set(), {64, 128}, p1, p, {{0.0, 0.0}});
  CHECK(x.pass);
  SzegoEvaluator S(m);
  const double a = std::abs(S.s12(p1, p, Representation::Form12));
  CHECK(a > 0.01);
  CHECK(std::abs(a - std::abs(S.s12(p1, p))) <= 1e-10 * a);
  CHECK(std::abs(radial_set().at(128).kernel(p1, p)) > 0.5 * std::sqrt(2 * kPi * 128) * a);

  CHECK_THROWS_AS(check_scaled_correlations(radial_set(), {64}, 1.1, p, {{0.0, 0.0}}), Error);
  const cplx c1a = curve_point(m, Curve::C1, 0.0), c1b = curve_point(m, Curve::C1, 0.1);
  CHECK_THROWS_AS(check_scaled_correlations(radial_set(), {64}, c1a, c1b, {{0.0, 0.0}}), Error);
}

TEST_CASE("outpost density: Gaussian profile, belt mass, Heine law") {
  const Model& m = radial_set().model();
  std::vector<double> tg;
  for (int k = -20; k <= 20; ++k) tg.push_back(0.1 * k);
  auto r = check_outpost_density(radial_set(), kNs, curve_point(m, Curve::C2, 0.0), tg);
  CHECK(r.pass);
  CHECK(find(r, "slope", 128).value <= 0.1);
  CHECK(find(r, "amplitude", 128).value <= 0.25);
  CHECK(find(r, "belt mass / mu", 64).value <= 0.25);
  CHECK(find(r, "belt mass / mu", 128).value < find(r, "belt mass / mu", 64).value);
  CHECK(find(r, "heine tv", 64).value <= 0.05);
  CHECK(find(r, "heine tv", 128).value <= 0.03);
  CHECK(find(r, "heine tv", 128).value < find(r, "heine tv", 64).value);
  CHECK_THROWS_AS(check_outpost_density(radial_set(), {64}, 1.0, tg), Error);
}

TEST_CASE("Berezin measures split between the curves") {
  const Model& m = radial_set().model();
  const cplx z = 2.0 * m.frame().r2();
  for (int n : {64, 128}) {
    auto r = check_berezin(radial_set(), n, {z});
    CAPTURE(n);
    CHECK(r.pass);
  }
  auto r = check_berezin(radial_set(), 128, {z});
  CHECK(find(r, "complement mass z (2.5,0)", 128).value <= 1e-3);
  CHECK(find(r, "total mass z (2.5,0)", 128).value <= 1e-8);
  CHECK_THROWS_AS(check_berezin(radial_set(), 64, {1.25}), Error);
}

TEST_CASE("edge error-function profile") {
  const Model& m = radial_set().model();
  auto r = check_edge_erfc(radial_set(), 128, curve_point(m, Curve::C1, 0.0), {-3.0, 0.0, 3.0});
  CHECK(r.pass);
  CHECK(find(r, "ratio t=0", 128).value <= 0.2);
  // far from the outpost the exterior side is empty
  KernelSet wide(build_radial_model(2.0, 1.0));
  auto w = check_edge_erfc(wide, 128, curve_point(wide.model(), Curve::C1, 0.0), {3.0});
  CHECK(w.pass);
  CHECK(find(w, "K/n t=3", 128).value <= 0.01);
}

TEST_CASE("sign arbitration on the radial oracle") {
  auto s = resolve_sign_convention(radial_c1_set(), 64);
  CHECK(s.conclusive());
  CHECK(s.matches_defaults());
  CHECK(s.report().pass);
  for (const auto& v : s.families) {
    CAPTURE(v.family);
    CHECK(std::min(v.err_minus, v.err_plus) * 2 <= std::max(v.err_minus, v.err_plus));
  }
  KernelSet el(build_elliptic_ginibre_model(0.3, 1.0, 1.8, 1.0));
  CHECK_THROWS_AS(resolve_sign_convention(el, 8), Error);
}

TEST_CASE("Berezin mass rows agree with the check") {
  const Model& m = radial_set().model();
  const cplx z = 2.0 * m.frame().r2();
  const BerezinMass b = berezin_mass(radial_set(), 64, z);
  auto r = check_berezin(radial_set(), 64, {z});
  CHECK(b.r == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(b.total - 1.0) == doctest::Approx(find(r, "total mass z (2.5,0)", 64).value).epsilon(1e-6));
  CHECK(std::abs(b.belt_b2 - b.closed_b2) == doctest::Approx(find(r, "B2 mass vs b2(1) z (2.5,0)", 64).value));
  CHECK(b.closed_b2 == doctest::Approx(b2_mass_closed(2.0, 1.0, 1.25, m.c())));
  CHECK_THROWS_AS(berezin_mass(radial_set(), 64, 1.25), Error);
}

TEST_CASE("density profile rows") {
  const Model& m = radial_set().model();
  const cplx p = curve_point(m, Curve::C2, 0.0);
  const auto& K = radial_set().at(64);
  const DensityProfile pr = outpost_profile(K, p, {-5.0, -1.0, 0.0, 0.5, 5.0});
  // |t| = 5 leaves N2 at n = 64
  CHECK(pr.t == std::vector<double>{-1.0, 0.0, 0.5});
  for (std::size_t i = 0; i < pr.t.size(); ++i) {
    CHECK(pr.value[i] == doctest::Approx(K.diagonal(zoom_point(m, p, pr.t[i], 64))));
    CHECK(pr.prediction[i] == doctest::Approx(pr.amplitude * std::exp(-pr.t[i] * pr.t[i])));
  }
  CHECK_THROWS_AS(outpost_profile(K, 1.0, {0.0}), Error);
}

TEST_CASE("named check selection") {
  auto r = run_checks(radial_set(), {64}, {"far_exterior", "edge_erfc"});
  REQUIRE(r.size() == 2);
  CHECK(r[0].theorem == "far_exterior_decay");
  CHECK(r[1].theorem == "edge_erfc");
  CHECK_THROWS_AS(run_checks(radial_set(), {64}, {"nope"}), Error);
  KernelSet g(build_ginibre_model());
  CHECK(run_checks(g, {16}, {"berezin"}).empty());
}
