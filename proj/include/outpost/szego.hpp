#pragma once

#include <functional>
#include <string>

#include "outpost/potential.hpp"

namespace outpost {

// Sign of c in the weight r1^{1-2j} / (r1^{1-2j} + e^{sign c} r2^{1-2j}) of the
// C1-centred series; for mu and the b2 mass it is the sign of c multiplying r1^{1-2j}.
enum class SignConvention { MinusC, PlusC };

const char* sign_name(SignConvention s);
SignConvention parse_sign(const std::string& s);
inline double sign_value(SignConvention s) { return s == SignConvention::MinusC ? -1.0 : 1.0; }

// Defaults fixed by verify::resolve_sign_convention on the radial oracle.
inline constexpr SignConvention kKernelSign = SignConvention::MinusC;
inline constexpr SignConvention kMuSign = SignConvention::PlusC;
inline constexpr SignConvention kB2Sign = SignConvention::PlusC;

struct SzegoParams {
  double r1 = 1.0;
  double r2 = 1.25;
  double c = 0.0;
  SignConvention sign = kKernelSign;
  double tol = 1e-14;
  int Jmax = 512;
};

enum class Representation { Auto, Form11, Form22, Form12, Extend };

class SzegoEvaluator {
 public:
  SzegoEvaluator(const Model& model, SzegoParams params);
  explicit SzegoEvaluator(const Model& model);

  const SzegoParams& params() const { return p_; }
  const Model& model() const { return model_; }

  cplx s1(cplx z, cplx w) const;
  cplx s12(cplx z, cplx w, Representation rep = Representation::Auto) const;

  // Series weights for index j >= 1.
  double weight11(int j) const;
  double weight22(int j) const;
  double weight12(int j) const;
  double extend_weight(int j) const;

  // Orthogonal basis of the Hardy-type space and its norms.
  cplx basis(int j, Curve k, cplx z) const;
  double basis_norm(int j, Curve k) const;

 private:
  struct Pre {
    cplx X;     // phi1(z) conj phi1(w)
    cplx pref;  // (1/2pi) sqrt(phi1'(z)) conj(sqrt(phi1'(w))) e^{(h1(z) + conj h1(w))/2}
  };
  Pre prefactor(cplx z, cplx w) const;
  cplx sum_series(cplx ratio_inv, const std::function<double(int)>& weight, double bound_scale,
                  double bound_ratio) const;

  Model model_;
  SzegoParams p_;
  double esc_;  // e^{sign c}
  double k_;    // r1 / r2
};

struct HeineDist {
  double theta = 0.0;
  double q = 0.0;
};

HeineDist heine_dist(double r1, double r2, double c);
double heine_pmf(const HeineDist& dist, int k);
double heine_log_pochhammer_neg(double theta, double q);  // log (-theta; q)_inf
double heine_mean(const HeineDist& dist);
// sum_j r2^{1-2j} / (r1^{1-2j} e^{sign c} + r2^{1-2j})
double mu_series(double r1, double r2, double c, SignConvention sign = kMuSign);
double heine_mean(const SzegoParams& params);

// Closed-form C2 mass of the boundary Berezin functional at r = |phi2(z)|.
double b2_mass_closed(double r, double r1, double r2, double c, SignConvention sign = kB2Sign);

struct BerezinOptions {
  int n0 = 128;
  int n_max = 1 << 15;
  double tol = 1e-12;
};

// b_z^{(k)}(f) = integral over C_k of f(q)|S12(z,q)|^2 / S12(z,z) |dq| / sqrt(Delta Q(q)).
cplx berezin_boundary(const SzegoEvaluator& S, cplx z, Curve k, const std::function<cplx(cplx)>& f,
                      const BerezinOptions& opts = {});

// Explicit squared-coefficient sum for the C2 integral of |S12(z, q)|^2.
double parseval_c2(const SzegoEvaluator& S, cplx z);

}  // namespace outpost
