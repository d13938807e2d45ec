#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "outpost/potential.hpp"

namespace outpost {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& v, int line, const std::string& key) {
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
    fail(ErrorCode::ConfigError, "line " + std::to_string(line) + ": key '" + key + "' expects a number, got '" + v + "'");
  return out;
}

}  // namespace

ModelParams parse_model_text(const std::string& text) {
  ModelParams p;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::set<std::string> seen;
  bool have_c = false, have_t0 = false, have_kind = false;
  double c = 0.0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::ConfigError, "line " + std::to_string(line) + ": expected key=value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (!seen.insert(key).second)
      fail(ErrorCode::ConfigError, "line " + std::to_string(line) + ": duplicate key '" + key + "'");
    if (key == "kind") {
      have_kind = true;
      if (val == "radial") p.kind = ModelKind::RadialOutpost;
      else if (val == "quadrature_domain") p.kind = ModelKind::QuadratureDomainOutpost;
      else if (val == "elliptic_ginibre") p.kind = ModelKind::EllipticGinibreOutpost;
      else if (val == "ginibre") p.kind = ModelKind::Ginibre;
      else fail(ErrorCode::ConfigError, "line " + std::to_string(line) + ": unknown kind '" + val + "'");
    } else if (key == "alpha_re") {
      p.alpha.real(parse_number(val, line, key));
    } else if (key == "alpha_im") {
      p.alpha.imag(parse_number(val, line, key));
    } else if (key == "r1") {
      p.r1 = parse_number(val, line, key);
    } else if (key == "r2") {
      p.r2 = parse_number(val, line, key);
    } else if (key == "t0") {
      p.t0 = parse_number(val, line, key);
      have_t0 = true;
    } else if (key == "c") {
      c = parse_number(val, line, key);
      have_c = true;
    } else if (key == "gap_fill") {
      if (val == "infinite") p.gap_fill = GapFill::Infinite;
      else if (val == "smooth") p.gap_fill = GapFill::Smooth;
      else fail(ErrorCode::ConfigError, "line " + std::to_string(line) + ": gap_fill must be infinite or smooth");
    } else if (key == "outpost") {
      if (val == "true") p.outpost = true;
      else if (val == "false") p.outpost = false;
      else fail(ErrorCode::ConfigError, "line " + std::to_string(line) + ": outpost must be true or false");
    } else {
      fail(ErrorCode::ConfigError, "line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  if (!have_kind) fail(ErrorCode::ConfigError, "missing key 'kind'");
  if (have_c) {
    // c is only a shorthand on the radial model, where Delta Q = 1 on C1
    if (p.kind != ModelKind::RadialOutpost)
      fail(ErrorCode::ConfigError, "key 'c' is only accepted for kind = radial; give t0 instead");
    if (have_t0) fail(ErrorCode::ConfigError, "keys 'c' and 't0' are mutually exclusive");
    p.t0 = std::exp(2.0 * c);
  }
  return p;
}

ModelParams load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model_text(ss.str());
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, path + ": " + e.detail());
  }
}

std::string model_params_text(const ModelParams& p) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "kind=" << model_kind_name(p.kind) << "\n"
      << "alpha_re=" << p.alpha.real() << "\n"
      << "alpha_im=" << p.alpha.imag() << "\n"
      << "r1=" << p.r1 << "\n"
      << "r2=" << p.r2 << "\n"
      << "t0=" << p.t0 << "\n"
      << "gap_fill=" << (p.gap_fill == GapFill::Smooth ? "smooth" : "infinite") << "\n"
      << "outpost=" << (p.outpost ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace outpost
