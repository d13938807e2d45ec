#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "outpost/opoly.hpp"
#include "outpost/szego.hpp"

namespace outpost {

struct Deviation {
  std::string label;
  int n = 0;
  double value = 0.0;
  double budget = kInf;  // value must not exceed this
  bool trend = false;    // value must not grow with n within the label
  double floor = 0.0;    // growth below this level is not a trend violation
};

struct TheoremReport {
  std::string theorem;
  std::vector<int> n;
  std::string grid;
  std::vector<Deviation> deviations;
  double max_deviation = 0.0;     // over trend-tracked deviations at the largest n
  double median_deviation = 0.0;
  std::optional<double> exponent_fit;  // -slope of log max deviation vs log n
  bool require_positive_exponent = false;
  double tolerance = kInf;  // budget for max_deviation
  bool pass = false;
  std::vector<std::string> notes;
};

// Recomputes max/median, the exponent fit and pass from the recorded deviations.
void finalize(TheoremReport& r);

// Lazily built kernels of one model.
class KernelSet {
 public:
  explicit KernelSet(Model model, MomentOptions opts = {});
  const Model& model() const { return model_; }
  const KernelEvaluator& at(int n);

 private:
  Model model_;
  MomentOptions opts_;
  std::map<int, std::unique_ptr<KernelEvaluator>> cache_;
};

struct VerifyOptions {
  double eta = 0.3;
  double M = 3.0;             // belt constant
  double M_complement = 4.0;  // belt constant for the Berezin complement mass
  double tol = 0.1;           // budget for the Szego ratio at the largest n
  SignConvention kernel_sign = kKernelSign;
  SignConvention mu_sign = kMuSign;
  SignConvention b2_sign = kB2Sign;
  int panels = 8;
};

// Point on C_k at conformal angle theta, and the exterior unit normal there.
cplx curve_point(const Model& m, Curve k, double theta);
cplx exterior_normal(const Model& m, cplx p);
// p + x / sqrt(2 n Delta Q(p)) nu(p)
cplx zoom_point(const Model& m, cplx p, double x, int n);
// Delta Q at a curve point, taken on the side where Q is finite.
double curve_laplacian(const Model& m, cplx p);
// Belt half-width M sqrt(log n / n) in |phi| units.
double belt_delta(int n, double M);

// Integral over K of g dA, patchwise Gauss-Legendre in u and trapezoid in theta.
// Patch ranges are split at star_breaks (star patches, fraction of C1) and at
// chart_breaks (|phi1| on annulus patches).
cplx integrate_over_K(const Model& m, const std::function<cplx(cplx)>& g, int n_theta, int panels,
                      const std::vector<double>& star_breaks = {}, const std::vector<double>& chart_breaks = {});

// Modulus form of the exterior kernel, |K_n(z,w)| e^{n(Q-V)(z)/2 + n(Q-V)(w)/2}.
double exterior_modulus(const KernelEvaluator& K, cplx z, cplx w);

std::vector<std::pair<cplx, cplx>> default_szego_pairs(const Model& m);

TheoremReport check_szego_convergence(KernelSet& ks, const std::vector<int>& ns,
                                      const std::vector<std::pair<cplx, cplx>>& pairs, const VerifyOptions& opts = {});
// |K_n(z,w)| for w at distance >= M sqrt(log n / n) from C1 and C2, z on the curves.
TheoremReport check_far_exterior(KernelSet& ks, int n, const VerifyOptions& opts = {});

TheoremReport check_scaled_correlations(KernelSet& ks, const std::vector<int>& ns, cplx p, cplx q,
                                        const std::vector<std::pair<double, double>>& st_grid,
                                        const VerifyOptions& opts = {});

// K_n(z,z) at z = zoom_point(p, t) for the t values inside N2, and amplitude * e^{-t^2}.
struct DensityProfile {
  std::vector<double> t, value, prediction;
  double amplitude = 0.0;
};
DensityProfile outpost_profile(const KernelEvaluator& K, cplx p, const std::vector<double>& t_grid,
                               SignConvention mu_sign = kMuSign);

TheoremReport check_outpost_density(KernelSet& ks, const std::vector<int>& ns, cplx p,
                                    const std::vector<double>& t_grid, const VerifyOptions& opts = {});

// Berezin measure of an exterior root z at |phi2(z)| = r: total mass and the mass of the C2 belt,
// next to the closed-form C2 mass of the limit functional.
struct BerezinMass {
  cplx z;
  int n = 0;
  double r = 0.0;
  double total = 0.0;
  double belt_b2 = 0.0;
  double closed_b2 = 0.0;
};
BerezinMass berezin_mass(KernelSet& ks, int n, cplx z, const VerifyOptions& opts = {});

TheoremReport check_berezin(KernelSet& ks, int n, const std::vector<cplx>& z_list, const VerifyOptions& opts = {});

TheoremReport check_edge_erfc(KernelSet& ks, int n, cplx p, const std::vector<double>& t_grid);

struct SignVerdict {
  std::string family;  // "kernel", "mu", "b2"
  double err_minus = 0.0, err_plus = 0.0;
  std::optional<SignConvention> verdict;  // empty if neither sign wins by a factor 2
};

struct SignResolution {
  std::vector<SignVerdict> families;
  bool conclusive() const;
  bool matches_defaults() const;
  TheoremReport report() const;
};

// Radial models only. Raises Inconclusive if a family has no verdict and `strict` is set.
SignResolution resolve_sign_convention(KernelSet& ks, int n = 64, bool strict = true);

// Names accepted by run_checks, in run order.
const std::vector<std::string>& check_names();
// The named checks with their default grids; the outpost checks are skipped for models without one.
std::vector<TheoremReport> run_checks(KernelSet& ks, const std::vector<int>& ns, const std::vector<std::string>& names,
                                      const VerifyOptions& opts = {});
// All checks with their default grids for a model; the radial-only parts are skipped otherwise.
std::vector<TheoremReport> run_all_checks(KernelSet& ks, const std::vector<int>& ns, const VerifyOptions& opts = {});

}  // namespace outpost
