#include <cmath>

#include <Eigen/Dense>

#include "doctest.h"
#include "outpost/szego.hpp"
#include "support.hpp"

using namespace outpost;
using testing_support::exterior_points;

namespace {

Model radial_c1() { return build_radial_model(1.5, std::exp(2.0)); }
Model qd_fig() { return build_quadrature_domain_model(-0.5, 0.735, 1.0, 1.0); }

// Brute-force sum of prefactor * sum_j X^{-j} w_j, w_j the C1-centred weight with sign s.
cplx brute_s12(const Model& m, cplx z, cplx w, double s, int terms) {
  const auto& fr = m.frame();
  cplx pz = fr.phi1(z), pw = fr.phi1(w);
  cplx X = pz * std::conj(pw);
  cplx pref = fr.sqrt_phi1_prime(z) * std::conj(fr.sqrt_phi1_prime(w)) *
              std::exp(0.5 * (m.h1(z) + std::conj(m.h1(w)))) / (2 * kPi);
  const double r1 = fr.r1(), r2 = fr.r2();
  cplx acc = 0.0;
  for (int j = 1; j <= terms; ++j) {
    const double a = std::pow(r1, 1 - 2 * j), b = std::exp(s * m.c()) * std::pow(r2, 1 - 2 * j);
    acc += std::pow(X, -j) * (a / (a + b));
  }
  return pref * acc;
}

}  // namespace

TEST_CASE("S1 closed form") {
  Model m = build_radial_model(1.25, 1.0);
  SzegoEvaluator S(m);
  CHECK(S.s1(2.0, 2.0).real() == doctest::Approx(1.0 / (6 * kPi)).epsilon(1e-14));
  cplx z = 2.0, w(1.5, 0.3);
  CHECK(std::abs(S.s1(z, w) - std::conj(S.s1(w, z))) < 1e-15);
  CHECK_THROWS_AS(S.s1(1.0, cplx(0.0, 1.0)), Error);

  Model q = qd_fig();
  SzegoEvaluator Sq(q);
  for (cplx p : exterior_points(q, 50, 1.05, 3.0, 11)) {
    cplx v = Sq.s1(p, p);
    CHECK(v.real() > 0);
    // geometric series with 1000 terms, all weights one
    cplx X = std::norm(q.frame().phi1(p));
    cplx pref = std::norm(q.frame().sqrt_phi1_prime(p)) * std::exp(q.h1(p).real()) / (2 * kPi);
    cplx acc = 0.0;
    for (int j = 1; j <= 1000; ++j) acc += std::pow(X, -j);
    CHECK(std::abs(pref * acc - v) <= 1e-12 * std::abs(v));
  }
}

TEST_CASE("representations agree") {
  for (const Model& m : {radial_c1(), qd_fig(), build_elliptic_ginibre_model(0.4, 1.0, 1.5, 2.0)}) {
    SzegoEvaluator S(m);
    const auto& fr = m.frame();
    const double R = fr.ratio();
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
      cplx z = fr.map().f(std::polar(1.2 * R, 0.4 * i));
      cplx w = fr.map().f(std::polar(1.2 * R, 1.3 - 0.7 * i));
      cplx a = S.s12(z, w, Representation::Form11);
      for (auto rep : {Representation::Form22, Representation::Form12, Representation::Extend})
        worst = std::max(worst, std::abs(S.s12(z, w, rep) - a));
      CHECK(std::abs(a - brute_s12(m, z, w, -1.0, 400)) < 1e-12);
    }
    CHECK(worst <= 1e-10);

    // overlap between the C1-centred form and the extension near the dispatch boundary
    for (double rho : {1.06, 1.1, 1.3}) {
      cplx z = fr.map().f(std::polar(rho, 0.2)), w = fr.map().f(std::polar(rho, 0.9));
      CHECK(std::abs(S.s12(z, w, Representation::Form11) - S.s12(z, w, Representation::Extend)) <= 1e-10);
    }
    // Hermitian symmetry, including inside |X| < 1
    for (auto [a, b] : {std::pair{0.9, 1.05}, std::pair{0.95, 0.95}, std::pair{1.4, 2.0}}) {
      if (a <= fr.map().inner_radius() * 1.01) continue;
      cplx z = fr.map().f(std::polar(a, 0.3)), w = fr.map().f(std::polar(b, 2.2));
      CHECK(std::abs(S.s12(z, w) - std::conj(S.s12(w, z))) <= 1e-13 * std::abs(S.s12(z, w)));
    }
  }
}

TEST_CASE("sign convention changes the series weights consistently") {
  Model m = radial_c1();
  SzegoParams p{1.0, 1.5, 1.0, SignConvention::PlusC};
  SzegoEvaluator S(m, p);
  cplx z(1.8, 0.4), w(-1.2, 1.4);
  CHECK(std::abs(S.s12(z, w, Representation::Form11) - brute_s12(m, z, w, 1.0, 400)) < 1e-12);
  CHECK(std::abs(S.s12(z, w, Representation::Form22) - S.s12(z, w, Representation::Form11)) < 1e-12);
  CHECK(std::abs(S.s12(z, w, Representation::Extend) - S.s12(z, w, Representation::Form12)) < 1e-12);
}

TEST_CASE("c to infinity recovers S1") {
  Model m = build_radial_model(1.25, 1.0);
  SzegoParams p{1.0, 1.25, 40.0};
  SzegoEvaluator S(m, p);
  CHECK(std::abs(S.s12(2.0, 2.5) - S.s1(2.0, 2.5)) <= 1e-12);
  SzegoEvaluator G(build_ginibre_model());
  CHECK(std::abs(G.s12(2.0, cplx(0, 1.5)) - G.s1(2.0, cplx(0, 1.5))) <= 1e-15);
}

TEST_CASE("domain and convergence errors") {
  Model m = build_radial_model(1.25, 1.0);
  SzegoEvaluator S(m);
  try {
    S.s12(0.7, 2.0);
    FAIL("expected OutsideDomainD");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutsideDomainD);
  }
  SzegoParams p{1.0, 1.25, 0.0, kKernelSign, 1e-14, 8};
  SzegoEvaluator tight(m, p);
  try {
    tight.s12(1.2, 1.2, Representation::Form11);
    FAIL("expected NonConvergent");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonConvergent);
  }
  CHECK_THROWS_AS(SzegoEvaluator(m, SzegoParams{1.0, 1.25, 0.0, kKernelSign, 1e-3}), Error);
}

TEST_CASE("diagonal on C2 for the radial model") {
  Model m = radial_c1();
  SzegoEvaluator S(m);
  cplx p = std::polar(1.5, 0.8);
  double acc = 0.0;
  for (int j = 1; j < 200; ++j) acc += std::pow(1.5, 1 - 2 * j) / (std::exp(1.0) + std::pow(1.5, 1 - 2 * j));
  // |phi2'(p)| = 1/1.5, and e^{Re h2} = sqrt(Delta Q) = e on C2 drops out of the normalised form
  const double expect = acc / 1.5 * std::exp(1.0) / (2 * kPi);
  CHECK(S.s12(p, p).real() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(S.s12(p, p).imag()) < 1e-15);
}

TEST_CASE("Heine distribution") {
  HeineDist zero{1e-14, 0.5};
  CHECK(heine_pmf(zero, 0) == doctest::Approx(1.0));
  CHECK(heine_pmf(zero, 1) < 1e-13);

  HeineDist d = heine_dist(1.0, 1.5, 1.0);
  CHECK(d.theta == doctest::Approx(0.245253).epsilon(1e-6));
  CHECK(d.q == doctest::Approx(4.0 / 9.0));
  double prod = 1.0;
  for (int j = 0; j < 20; ++j) prod *= 1.0 / (1.0 + d.theta * std::pow(d.q, j));
  CHECK(heine_pmf(d, 0) == doctest::Approx(prod).epsilon(1e-7));
  CHECK(heine_pmf(d, 0) == doctest::Approx(0.6646).epsilon(1e-4));

  for (HeineDist h : {d, heine_dist(1.0, 1.25, 0.0), HeineDist{3.0, 0.9}}) {
    double total = 0.0, mean = 0.0;
    for (int k = 0; k <= 200; ++k) {
      total += heine_pmf(h, k);
      mean += k * heine_pmf(h, k);
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    CHECK(std::abs(mean - heine_mean(h)) <= 1e-12);
  }
  double total = 0.0;
  for (int k = 0; k <= 40; ++k) total += heine_pmf(d, k);
  CHECK(std::abs(total - 1.0) <= 1e-12);
}

TEST_CASE("mu series") {
  CHECK(mu_series(1.0, 1.5, 1.0) == doctest::Approx(0.3796).epsilon(1e-4));
  CHECK(std::abs(mu_series(1.0, 1.5, 1.0) - heine_mean(heine_dist(1.0, 1.5, 1.0))) <= 1e-12);
  double direct = 0.0;
  for (int k = 1; k < 400; ++k) direct += std::pow(0.8, 2 * k - 1) / (1 + std::pow(0.8, 2 * k - 1));
  CHECK(std::abs(mu_series(1.0, 1.25, 0.0) - direct) <= 1e-12);
  CHECK(mu_series(1.0, 1.5, 60.0) < 1e-25);
  CHECK(std::abs(heine_mean(SzegoParams{0.735, 1.0, 0.3}) - heine_mean(heine_dist(0.735, 1.0, 0.3))) <= 1e-12);
  // the other sign is a different number
  CHECK(mu_series(1.0, 1.5, 1.0, SignConvention::MinusC) == doctest::Approx(1.613).epsilon(1e-3));
}

TEST_CASE("Berezin functional reproduces boundary data") {
  for (const Model& m : {radial_c1(), qd_fig(), build_elliptic_ginibre_model(0.4, 1.0, 1.5, 2.0)}) {
    SzegoEvaluator S(m);
    const auto& fr = m.frame();
    const double R = fr.ratio();
    for (cplx z : {fr.map().f(std::polar(1.5 * R, 0.3)), fr.map().f(std::polar(0.5 * (1 + R), 2.0)),
                   fr.map().f(std::polar(3.0 * R, -1.1))}) {
      auto one = [](cplx) { return cplx(1.0); };
      cplx mass = berezin_boundary(S, z, Curve::C1, one) + berezin_boundary(S, z, Curve::C2, one);
      CHECK(std::abs(mass - 1.0) <= 1e-9);
      for (int k = 1; k <= 3; ++k) {
        auto f = [&fr, k](cplx q) { return std::pow(fr.phi1(q), -k); };
        cplx b = berezin_boundary(S, z, Curve::C1, f) + berezin_boundary(S, z, Curve::C2, f);
        CHECK(std::abs(b - f(z)) <= 1e-8);
      }
    }
  }
}

TEST_CASE("closed-form C2 mass") {
  Model m = radial_c1();
  SzegoEvaluator S(m);
  for (double r : {1.1, 2.0, 4.0}) {
    cplx z = std::polar(r * 1.5, 0.4);
    auto one = [](cplx) { return cplx(1.0); };
    const double quad = berezin_boundary(S, z, Curve::C2, one).real();
    CHECK(std::abs(quad - b2_mass_closed(r, 1.0, 1.5, 1.0)) <= 1e-9);
  }
  // r -> infinity: first-term dominance
  CHECK(b2_mass_closed(1e6, 1.0, 1.5, 1.0) == doctest::Approx(1 / (1 + 1.5 * std::exp(1.0))).epsilon(1e-5));
  CHECK(b2_mass_closed(1e6, 1.0, 1.5, 1.0) == doctest::Approx(0.197).epsilon(1e-3));
  CHECK(b2_mass_closed(1e6, 1.0, 1.5, 1.0, SignConvention::MinusC) == doctest::Approx(0.6444).epsilon(1e-4));
  // mass grows from 0 at |phi2| = r1 / r2
  CHECK(b2_mass_closed(1.0 / 1.5 + 1e-9, 1.0, 1.5, 1.0) < 1e-3);
  double prev = 0.0;
  for (double r = 0.7; r < 20; r *= 1.2) {
    const double v = b2_mass_closed(r, 1.0, 1.5, 1.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("basis orthogonality against the weighted boundary norm") {
  for (const Model& m : {radial_c1(), qd_fig()}) {
    SzegoEvaluator S(m);
    const auto& fr = m.frame();
    const int N = 512;
    for (Curve k : {Curve::C1, Curve::C2}) {
      Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(8, 8);
      for (Curve c : {Curve::C1, Curve::C2}) {
        const double rho = c == Curve::C1 ? 1.0 : fr.ratio();
        const LaurentFunction& h = c == Curve::C1 ? m.harmonic().h1 : m.harmonic().h2;
        for (int i = 0; i < N; ++i) {
          cplx w = std::polar(rho, 2 * kPi * i / N);
          cplx q = fr.map().f(w);
          const double ds = rho * std::abs(fr.map().df(w)) * std::exp(-h.at_w(w).real()) * (2 * kPi / N);
          for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) G(a, b) += S.basis(a + 1, k, q) * std::conj(S.basis(b + 1, k, q)) * ds;
        }
      }
      for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) {
          const double want = a == b ? S.basis_norm(a + 1, k) : 0.0;
          CHECK(std::abs(G(a, b) - want) <= 1e-9 * S.basis_norm(std::max(a, b) + 1, k));
        }
    }
    // kernel = sum of normalised basis products
    cplx z = fr.map().f(std::polar(2.0, 0.5)), w = fr.map().f(std::polar(1.7, -0.8));
    cplx acc = 0.0;
    for (int j = 1; j < 200; ++j) acc += S.basis(j, Curve::C1, z) * std::conj(S.basis(j, Curve::C1, w)) / S.basis_norm(j, Curve::C1);
    CHECK(std::abs(acc - S.s12(z, w)) < 1e-13);
  }
}

TEST_CASE("Parseval step on C2") {
  for (const Model& m : {radial_c1(), qd_fig()}) {
    SzegoEvaluator S(m);
    const auto& fr = m.frame();
    for (cplx z : {fr.map().f(std::polar(1.5, 0.1)), fr.map().f(std::polar(2.0, 1.0)), fr.map().f(std::polar(3.0, 2.5))}) {
      const double szz = S.s12(z, z).real();
      const double quad = berezin_boundary(S, z, Curve::C2, [](cplx) { return cplx(1.0); }).real() * szz;
      CHECK(std::abs(quad - parseval_c2(S, z)) <= 1e-9 * std::max(1.0, quad));
    }
  }
}

TEST_CASE("Gram matrix of the kernel is positive semidefinite") {
  for (const Model& m : {radial_c1(), qd_fig()}) {
    SzegoEvaluator S(m);
    auto pts = exterior_points(m, 8, 0.97, 3.0, 21);
    Eigen::MatrixXcd G(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) G(i, j) = S.s12(pts[i], pts[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * G.trace().real());
  }
}
