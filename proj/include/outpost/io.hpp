#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "outpost/sampler.hpp"
#include "outpost/verify.hpp"

namespace outpost {

inline constexpr const char* kVersion = "0.1.0";

// Writes to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Shortest round-trip decimal with '.' separator, independent of the locale.
// Non-finite values print as inf, -inf, nan.
std::string format_double(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> row);
  void add_row(const std::vector<double>& row);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct KernelPoint {
  cplx z, w, K;
  double log10_abs_K = 0.0;
};

// Weighted kernel at each pair; log10|K| computed in log space so it survives underflow.
std::vector<KernelPoint> kernel_points(const KernelEvaluator& K, const std::vector<std::pair<cplx, cplx>>& pairs);
CsvTable kernel_csv(const std::vector<KernelPoint>& pts);
CsvTable samples_csv(const std::vector<std::vector<cplx>>& samples);
CsvTable histogram_csv(const std::vector<long long>& histogram);
CsvTable pmf_csv(const std::vector<double>& pmf);
CsvTable boundary_csv(const Model& m, Curve k, int count);
CsvTable berezin_csv(const std::vector<BerezinMass>& rows);
// t, value, prediction columns for a density profile
CsvTable profile_csv(const std::vector<double>& t, const std::vector<double>& value, const std::vector<double>& pred);

nlohmann::json report_json(const TheoremReport& r);
// w0, r1*, c, theta, q, mu and the resolved parameters; Heine fields only with an outpost.
nlohmann::json model_summary(const Model& m, SignConvention mu_sign = kMuSign);

// manifest.json in `dir`: version, command, resolved configuration and the files written.
void write_manifest(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& config,
                    const std::vector<std::string>& outputs);

}  // namespace outpost
