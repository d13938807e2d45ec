#include "outpost/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "outpost/parallel.hpp"

namespace outpost {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorCode::IoError, "cannot create directory " + dir.string() + ": " + ec.message());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(f), ErrorCode::IoError, "cannot open " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    require(static_cast<bool>(f), ErrorCode::IoError, "write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorCode::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
  require(row.size() == header_.size(), ErrorCode::InvalidParameter, "CSV row width does not match the header");
  rows_.push_back(std::move(row));
}

void CsvTable::add_row(const std::vector<double>& row) {
  std::vector<std::string> s;
  s.reserve(row.size());
  for (double x : row) s.push_back(format_double(x));
  add_row(std::move(s));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::vector<KernelPoint> kernel_points(const KernelEvaluator& K, const std::vector<std::pair<cplx, cplx>>& pairs) {
  const Model& m = K.model();
  std::vector<KernelPoint> out(pairs.size());
  // non-radial evaluation touches the process-global extended precision, so it stays serial
  parallel_for(pairs.size(), K.radial_fast_path() ? 0 : 1, [&](std::size_t i) {
    const auto [z, w] = pairs[i];
    const double qz = m.Q(z), qw = m.Q(w);
    out[i] = {z, w, K.weighted_kernel(z, qz, w, qw), K.log_abs_weighted_kernel(z, qz, w, qw) / std::log(10.0)};
  });
  return out;
}

CsvTable kernel_csv(const std::vector<KernelPoint>& pts) {
  CsvTable t({"re_z", "im_z", "re_w", "im_w", "re_K", "im_K", "log10_abs_K"});
  for (const auto& p : pts)
    t.add_row(std::vector<double>{p.z.real(), p.z.imag(), p.w.real(), p.w.imag(), p.K.real(), p.K.imag(),
                                  p.log10_abs_K});
  return t;
}

CsvTable samples_csv(const std::vector<std::vector<cplx>>& samples) {
  CsvTable t({"sample_id", "point_id", "re", "im"});
  for (std::size_t s = 0; s < samples.size(); ++s)
    for (std::size_t i = 0; i < samples[s].size(); ++i)
      t.add_row({std::to_string(s), std::to_string(i), format_double(samples[s][i].real()),
                 format_double(samples[s][i].imag())});
  return t;
}

CsvTable histogram_csv(const std::vector<long long>& histogram) {
  CsvTable t({"k", "count"});
  for (std::size_t k = 0; k < histogram.size(); ++k) t.add_row({std::to_string(k), std::to_string(histogram[k])});
  return t;
}

CsvTable pmf_csv(const std::vector<double>& pmf) {
  CsvTable t({"k", "pmf"});
  for (std::size_t k = 0; k < pmf.size(); ++k) t.add_row({std::to_string(k), format_double(pmf[k])});
  return t;
}

CsvTable boundary_csv(const Model& m, Curve k, int count) {
  require(count > 0, ErrorCode::InvalidParameter, "boundary point count must be positive");
  CsvTable t({"curve", "theta", "re", "im"});
  const std::string name = k == Curve::C1 ? "C1" : "C2";
  for (int i = 0; i < count; ++i) {
    const double th = 2 * kPi * i / count;
    const cplx p = curve_point(m, k, th);
    t.add_row({name, format_double(th), format_double(p.real()), format_double(p.imag())});
  }
  return t;
}

CsvTable berezin_csv(const std::vector<BerezinMass>& rows) {
  CsvTable t({"n", "r", "re_z", "im_z", "total_mass", "belt_mass_B2", "b2_closed"});
  for (const auto& b : rows)
    t.add_row({std::to_string(b.n), format_double(b.r), format_double(b.z.real()), format_double(b.z.imag()),
               format_double(b.total), format_double(b.belt_b2), format_double(b.closed_b2)});
  return t;
}

CsvTable profile_csv(const std::vector<double>& t, const std::vector<double>& value, const std::vector<double>& pred) {
  require(t.size() == value.size() && t.size() == pred.size(), ErrorCode::InvalidParameter,
          "profile columns differ in length");
  CsvTable out({"t", "value", "prediction"});
  for (std::size_t i = 0; i < t.size(); ++i) out.add_row(std::vector<double>{t[i], value[i], pred[i]});
  return out;
}

namespace {

// JSON has no inf/nan; those become strings so the reader sees what happened.
nlohmann::json num(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

}  // namespace

nlohmann::json report_json(const TheoremReport& r) {
  nlohmann::json devs = nlohmann::json::array();
  for (const auto& d : r.deviations)
    devs.push_back({{"label", d.label},
                    {"n", d.n},
                    {"value", num(d.value)},
                    {"budget", num(d.budget)},
                    {"trend", d.trend},
                    {"floor", num(d.floor)}});
  nlohmann::json j = {{"theorem", r.theorem},
                      {"n", r.n},
                      {"deviations", devs},
                      {"exponent_fit", r.exponent_fit ? num(*r.exponent_fit) : nlohmann::json(nullptr)},
                      {"pass", r.pass},
                      {"grid", r.grid},
                      {"max_deviation", num(r.max_deviation)},
                      {"median_deviation", num(r.median_deviation)},
                      {"tolerance", num(r.tolerance)},
                      {"require_positive_exponent", r.require_positive_exponent},
                      {"notes", r.notes}};
  return j;
}

nlohmann::json model_summary(const Model& m, SignConvention mu_sign) {
  const ModelParams& p = m.params();
  nlohmann::json j = {{"kind", model_kind_name(p.kind)},
                      {"alpha", {p.alpha.real(), p.alpha.imag()}},
                      {"r1", p.r1},
                      {"r2", p.r2},
                      {"t0", p.t0},
                      {"outpost", p.outpost},
                      {"gap_fill", p.gap_fill == GapFill::Infinite ? "infinite" : "smooth"},
                      {"capacity_C1", m.frame().r1()},
                      {"capacity_C2", m.frame().r2()},
                      {"c", num(m.c())},
                      {"laplacian_C1", m.droplet_laplacian()}};
  j["w0"] = m.w0() ? nlohmann::json(*m.w0()) : nlohmann::json(nullptr);
  j["r1_star"] = m.r1_star() ? nlohmann::json(*m.r1_star()) : nlohmann::json(nullptr);
  if (m.has_outpost()) {
    const double r1 = m.frame().r1(), r2 = m.frame().r2();
    const HeineDist h = heine_dist(r1, r2, m.c());
    j["theta"] = h.theta;
    j["q"] = h.q;
    j["mu"] = mu_series(r1, r2, m.c(), mu_sign);
    j["heine_mean"] = heine_mean(h);
  }
  return j;
}

void write_manifest(const fs::path& dir, const std::string& command, const nlohmann::json& config,
                    const std::vector<std::string>& outputs) {
  nlohmann::json j = {{"version", kVersion}, {"command", command}, {"config", config}, {"outputs", outputs}};
  write_file_atomic(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace outpost
