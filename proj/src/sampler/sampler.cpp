#include "outpost/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "outpost/parallel.hpp"

namespace outpost {

double SplitMix64::normal() {
  // Box-Muller; one value per call keeps streams position-independent
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * kPi * u2);
}

SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mix(seed ^ 0x6a09e667f3bcc909ULL);
  const std::uint64_t a = mix();
  SplitMix64 mix2(a + index * 0xd1342543de82ef95ULL);
  return SplitMix64(mix2());
}

// ---------------- DPP sampler ----------------

namespace {

std::vector<Patch> sampling_patches(const KernelEvaluator& K) {
  const Model& m = K.model();
  if (m.kind() == ModelKind::Ginibre) {
    require(K.basis().cutoff_radius > 0, ErrorCode::InvalidParameter, "Ginibre basis without a cutoff radius");
    return m.patches(K.basis().cutoff_radius);
  }
  return m.patches();
}

// K(z,z) * dA/(du dtheta) at a parameter point.
double density(const KernelEvaluator& K, const Patch& p, double u, double theta) {
  PatchPoint pp = K.model().patch_point(p, u, theta);
  if (!std::isfinite(pp.Q) || pp.jacobian <= 0) return 0.0;
  return K.weighted_kernel(pp.z, pp.Q, pp.z, pp.Q).real() * pp.jacobian;
}

}  // namespace

DppSampler::DppSampler(const KernelEvaluator& kernel, SampleConfig cfg) : K_(kernel), cfg_(cfg) {
  require(cfg_.envelope_margin >= 1.0, ErrorCode::InvalidParameter, "envelope_margin must be at least 1");
  require(cfg_.grid_u >= 4 && cfg_.grid_theta >= 4, ErrorCode::InvalidParameter, "envelope grid too coarse");
  require(cfg_.n_samples >= 0, ErrorCode::InvalidParameter, "n_samples must be nonnegative");
  patches_ = sampling_patches(K_);
  const int np = static_cast<int>(patches_.size());
  const int nt = cfg_.grid_theta;
  const double dt = 2 * kPi / nt;
  // envelope values are independent per patch; double-precision kernels run on the pool
  const int threads = K_.radial_fast_path() ? cfg_.threads : 1;
  for (int pi = 0; pi < np; ++pi) {
    const Patch& p = patches_[pi];
    const int nu = std::max(16, cfg_.grid_u / np);
    const double du = (p.u1 - p.u0) / nu;
    std::vector<double> node((nu + 1) * static_cast<size_t>(nt)), mid(static_cast<size_t>(nu) * nt);
    parallel_for(static_cast<size_t>(nu + 1), threads, [&](size_t a) {
      for (int b = 0; b < nt; ++b) {
        node[a * nt + b] = density(K_, p, p.u0 + du * a, dt * b);
        if (static_cast<int>(a) < nu) mid[a * nt + b] = density(K_, p, p.u0 + du * (a + 0.5), dt * (b + 0.5));
      }
    });
    first_cell_.push_back(static_cast<int>(cells_.size()));
    nu_.push_back(nu);
    for (int a = 0; a < nu; ++a)
      for (int b = 0; b < nt; ++b) {
        const int b1 = (b + 1) % nt;
        double mx = mid[static_cast<size_t>(a) * nt + b];
        for (int da = 0; da <= 1; ++da)
          for (int bb : {b, b1}) mx = std::max(mx, node[static_cast<size_t>(a + da) * nt + bb]);
        cells_.push_back({pi, p.u0 + du * a, p.u0 + du * (a + 1), dt * b, dt * (b + 1), mx * cfg_.envelope_margin});
      }
  }
  cumulative_.resize(cells_.size());
  double acc = 0.0;
  for (size_t c = 0; c < cells_.size(); ++c) {
    acc += cells_[c].env * (cells_[c].u1 - cells_[c].u0) * (cells_[c].t1 - cells_[c].t0);
    cumulative_[c] = acc;
  }
  require(acc > 0, ErrorCode::InvalidParameter, "kernel vanishes on K");
}

double DppSampler::envelope_at(int patch, double u, double theta) const {
  const Patch& p = patches_.at(patch);
  const int nu = nu_[patch];
  const int nt = cfg_.grid_theta;
  int a = std::clamp(static_cast<int>((u - p.u0) / (p.u1 - p.u0) * nu), 0, nu - 1);
  double t = std::fmod(theta, 2 * kPi);
  if (t < 0) t += 2 * kPi;
  int b = std::clamp(static_cast<int>(t / (2 * kPi) * nt), 0, nt - 1);
  return cells_[first_cell_[patch] + a * nt + b].env;
}

Sample DppSampler::draw(std::uint64_t index) const {
  const int n = K_.n();
  SplitMix64 rng = stream(cfg_.seed, index);
  Sample out;
  std::vector<std::vector<cplx>> basis;  // orthonormal frame of the drawn wave vectors
  double scale = 1.0;
  const double total = cumulative_.back();
  std::vector<cplx> v(n);
  for (int k = 0; k < n; ++k) {
    long tries = 0;
    for (;;) {
      if (++tries > cfg_.max_rejections) fail(ErrorCode::MaxRejections, "rejection sampler exhausted its budget");
      ++out.proposals;
      const double x = rng.uniform() * total;
      const size_t c = std::min<size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), x) - cumulative_.begin(),
                                        cells_.size() - 1);
      const Cell& cell = cells_[c];
      const double u = cell.u0 + (cell.u1 - cell.u0) * rng.uniform();
      const double th = cell.t0 + (cell.t1 - cell.t0) * rng.uniform();
      const double accept = rng.uniform();
      PatchPoint pp = K_.model().patch_point(patches_[cell.patch], u, th);
      if (!std::isfinite(pp.Q) || pp.jacobian <= 0) continue;
      ScaledVector sv = K_.wave_vector(pp.z, pp.Q);
      const double s = std::exp(sv.log_scale);
      double norm2 = 0.0;
      for (int j = 0; j < n; ++j) {
        v[j] = sv.mant[j] * s;
        norm2 += std::norm(v[j]);
      }
      // Schur complement on the drawn points = squared distance to their span
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& e : basis) {
          cplx c2 = 0.0;
          for (int j = 0; j < n; ++j) c2 += v[j] * std::conj(e[j]);
          for (int j = 0; j < n; ++j) v[j] -= c2 * e[j];
        }
      double cond = 0.0;
      for (int j = 0; j < n; ++j) cond += std::norm(v[j]);
      cond = std::min(cond, norm2);
      const double g = cond * pp.jacobian;
      const double env = cell.env * scale;
      if (g > env) {
        ++out.envelope_violations;
        scale *= 2.0;
        continue;
      }
      if (accept * env < g) {
        const double inv = 1.0 / std::sqrt(cond);
        for (auto& x : v) x *= inv;
        basis.push_back(v);
        out.points.push_back(pp.z);
        break;
      }
    }
  }
  return out;
}

std::vector<Sample> DppSampler::draw_all() const {
  std::vector<Sample> out(cfg_.n_samples);
  const int threads = K_.radial_fast_path() ? cfg_.threads : 1;
  parallel_for(out.size(), threads, [&](size_t i) { out[i] = draw(i); });
  return out;
}

std::vector<cplx> sample_dpp(const KernelEvaluator& kernel, const SampleConfig& cfg, std::uint64_t index) {
  return DppSampler(kernel, cfg).draw(index).points;
}

// ---------------- MCMC oracle ----------------

namespace {

struct GibbsState {
  const Model& model;
  int n;
  double disk;  // bounding radius for uniform proposals
  bool ginibre;

  double Q(cplx z) const {
    if (ginibre && std::abs(z) > disk) return kInf;
    return model.Q(z);
  }
  cplx uniform_point(SplitMix64& rng) const {
    for (;;) {
      cplx z(disk * (2 * rng.uniform() - 1), disk * (2 * rng.uniform() - 1));
      if (std::abs(z) <= disk && std::isfinite(Q(z))) return z;
    }
  }
};

}  // namespace

McmcResult sample_gibbs_mcmc(const Model& model, int n, const McmcConfig& cfg) {
  require(n >= 1 && n <= 32, ErrorCode::PreconditionViolated, "MCMC oracle is limited to n <= 32");
  require(cfg.steps >= 0 && cfg.burn_in >= 0 && cfg.thin >= 1, ErrorCode::InvalidParameter, "bad MCMC schedule");
  const bool gin = model.kind() == ModelKind::Ginibre;
  const double A = model.droplet_laplacian();
  GibbsState st{model, n, gin ? 1.0 / std::sqrt(A) + 4.0 / std::sqrt(n * A) : model.outer_radius(), gin};
  SplitMix64 rng = stream(cfg.seed, 0);
  std::vector<cplx> z(n);
  std::vector<double> q(n);
  for (int i = 0; i < n; ++i) {
    do z[i] = st.uniform_point(rng);
    while (model.region(z[i]) != Region::Interior);
    q[i] = st.Q(z[i]);
  }
  double step = 0.5 / std::sqrt(static_cast<double>(n));
  McmcResult res;
  long accepted = 0, window_acc = 0, window = 0;
  const long total = cfg.burn_in + cfg.steps;
  const long record_every = static_cast<long>(cfg.thin) * n;
  for (long t = 0; t < total; ++t) {
    const int i = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    const bool uni = rng.uniform() < cfg.uniform_mix;
    cplx prop = uni ? st.uniform_point(rng) : z[i] + step * cplx(rng.normal(), rng.normal());
    const double accept_u = rng.uniform();
    const double qp = st.Q(prop);
    bool ok = false;
    if (std::isfinite(qp)) {
      double d = -n * (qp - q[i]);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        d += 2.0 * (std::log(std::abs(prop - z[j])) - std::log(std::abs(z[i] - z[j])));
      }
      ok = d >= 0 || accept_u < std::exp(d);
    }
    if (ok) {
      z[i] = prop;
      q[i] = qp;
      if (!std::isfinite(qp)) ++res.infinite_visits;
    }
    if (t < cfg.burn_in) {
      if (!uni) {
        ++window;
        window_acc += ok;
        if (window == 200) {
          step *= std::exp(static_cast<double>(window_acc) / window - cfg.target_accept);
          window = window_acc = 0;
        }
      }
      continue;
    }
    accepted += ok;
    if ((t - cfg.burn_in + 1) % record_every == 0) res.samples.push_back(z);
  }
  res.acceptance = cfg.steps > 0 ? static_cast<double>(accepted) / cfg.steps : 0.0;
  res.step = step;
  return res;
}

// ---------------- statistics ----------------

bool CountWindow::contains(const Model& model, cplx z) const {
  if (!model.in_K(z)) return false;
  const double r = std::abs(model.frame().map().invert(z)) / model.frame().ratio();
  return r >= lo && r <= hi;
}

CountWindow neighbourhood_window(const Model& model) {
  const double w = model.width();
  return {1.0 - w, 1.0 + w};
}

CountWindow belt_window(const Model& model, int n, double M) {
  const double w = model.width();
  const double d = std::min(w, M * std::sqrt(std::log(static_cast<double>(n)) / n));
  return {1.0 - d, 1.0 + d};
}

std::vector<double> OutlierStats::pmf() const {
  std::vector<double> out(histogram.size(), 0.0);
  if (n_samples == 0) return out;
  for (size_t k = 0; k < histogram.size(); ++k) out[k] = static_cast<double>(histogram[k]) / n_samples;
  return out;
}

OutlierStats outlier_stats(const std::vector<std::vector<cplx>>& samples, const Model& model, const CountWindow& w) {
  OutlierStats s;
  s.n_samples = static_cast<long long>(samples.size());
  double sum = 0.0, sum2 = 0.0;
  for (const auto& pts : samples) {
    const size_t k = std::count_if(pts.begin(), pts.end(), [&](cplx z) { return w.contains(model, z); });
    if (s.histogram.size() <= k) s.histogram.resize(k + 1, 0);
    ++s.histogram[k];
    sum += k;
    sum2 += static_cast<double>(k) * k;
  }
  if (s.histogram.empty()) s.histogram.assign(1, 0);
  if (s.n_samples > 0) {
    s.mean = sum / s.n_samples;
    s.variance = s.n_samples > 1 ? (sum2 - s.n_samples * s.mean * s.mean) / (s.n_samples - 1) : 0.0;
  }
  return s;
}

OutlierStats outlier_stats(const std::vector<Sample>& samples, const Model& model, const CountWindow& w) {
  std::vector<std::vector<cplx>> pts;
  pts.reserve(samples.size());
  for (const auto& s : samples) pts.push_back(s.points);
  return outlier_stats(pts, model, w);
}

std::vector<double> poisson_binomial(const std::vector<double>& p) {
  std::vector<double> f{1.0};
  for (double pj : p) {
    require(pj >= 0.0 && pj <= 1.0, ErrorCode::InvalidParameter, "probability outside [0, 1]");
    f.push_back(0.0);
    for (size_t k = f.size() - 1; k > 0; --k) f[k] = f[k] * (1 - pj) + f[k - 1] * pj;
    f[0] *= 1 - pj;
  }
  return f;
}

std::vector<double> exact_count_law(const Model& model, int n, const CountWindow& w, const MomentOptions& opts) {
  const double r2 = model.frame().r2();
  return poisson_binomial(radial_annulus_shares(model, n, w.lo * r2, w.hi * r2, opts));
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t m = std::max(a.size(), b.size());
  double s = 0.0;
  for (size_t k = 0; k < m; ++k) s += std::abs((k < a.size() ? a[k] : 0.0) - (k < b.size() ? b[k] : 0.0));
  return 0.5 * s;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double m = static_cast<double>(sample.size());
  double d = 0.0;
  for (size_t i = 0; i < sample.size(); ++i) {
    const double F = cdf(sample[i]);
    d = std::max({d, std::abs(F - i / m), std::abs((i + 1) / m - F)});
  }
  return d;
}

}  // namespace outpost
