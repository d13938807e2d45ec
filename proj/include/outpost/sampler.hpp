#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "outpost/opoly.hpp"

namespace outpost {

// SplitMix64; one independent stream per (seed, index) pair.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state = 0) : s_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // uniform on [0, 1)
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double normal();

 private:
  std::uint64_t s_;
};

SplitMix64 stream(std::uint64_t seed, std::uint64_t index);

struct SampleConfig {
  int n_samples = 1;
  std::uint64_t seed = 1;
  double envelope_margin = 1.2;
  int grid_u = 128;      // cells in the radial parameter, over all patches
  int grid_theta = 256;
  long max_rejections = 10'000'000;  // per point
  int threads = 0;       // 0: hardware concurrency (double-precision kernels only)
};

struct Sample {
  std::vector<cplx> points;
  long proposals = 0;
  int envelope_violations = 0;
};

// Sequential conditional (projection DPP) sampler with a piecewise-constant envelope
// on the parameter grid of K.
class DppSampler {
 public:
  DppSampler(const KernelEvaluator& kernel, SampleConfig cfg);
  Sample draw(std::uint64_t index) const;
  std::vector<Sample> draw_all() const;
  const SampleConfig& config() const { return cfg_; }
  // Upper bound used for K(z,z) * Jacobian at a parameter point; exposed for tests.
  double envelope_at(int patch, double u, double theta) const;

 private:
  struct Cell {
    int patch;
    double u0, u1, t0, t1;
    double env;
  };
  KernelEvaluator K_;
  SampleConfig cfg_;
  std::vector<Patch> patches_;
  std::vector<Cell> cells_;
  std::vector<double> cumulative_;
  std::vector<int> first_cell_;  // per patch
  std::vector<int> nu_;          // cells in u per patch
};

std::vector<cplx> sample_dpp(const KernelEvaluator& kernel, const SampleConfig& cfg, std::uint64_t index = 0);

struct McmcConfig {
  long steps = 200000;  // single-site updates after burn-in
  long burn_in = 20000;
  int thin = 1;         // record every thin * n updates
  std::uint64_t seed = 1;
  double uniform_mix = 0.1;
  double target_accept = 0.23;
};

struct McmcResult {
  std::vector<std::vector<cplx>> samples;
  double acceptance = 0.0;
  double step = 0.0;
  long infinite_visits = 0;  // accepted states with Q = +inf; zero by construction
};

// For the Ginibre potential the chain lives on |z| <= 1/sqrt(A) + 4 / sqrt(n A).
McmcResult sample_gibbs_mcmc(const Model& model, int n, const McmcConfig& cfg);

// Counting window {lo <= |phi2(z)| <= hi}.
struct CountWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(const Model& model, cplx z) const;
};

// Fixed neighbourhood N of C2 (the outpost annulus N2).
CountWindow neighbourhood_window(const Model& model);
// Belt B2 of half-width M sqrt(log n / n) around C2, clipped to N2.
CountWindow belt_window(const Model& model, int n, double M = 3.0);

struct OutlierStats {
  std::vector<long long> histogram;  // histogram[k] = samples with k points in the window
  long long n_samples = 0;
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> pmf() const;
};

OutlierStats outlier_stats(const std::vector<std::vector<cplx>>& samples, const Model& model, const CountWindow& w);
OutlierStats outlier_stats(const std::vector<Sample>& samples, const Model& model, const CountWindow& w);

// Law of a sum of independent Bernoulli(p_j).
std::vector<double> poisson_binomial(const std::vector<double>& p);
// Rotation-invariant models: exact finite-n law of the count in the window.
std::vector<double> exact_count_law(const Model& model, int n, const CountWindow& w, const MomentOptions& opts = {});
double total_variation(const std::vector<double>& a, const std::vector<double>& b);
// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

}  // namespace outpost
