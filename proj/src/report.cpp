#include "conelab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace conelab {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string survival_csv(const DpSeries& s) {
  std::ostringstream os;
  os << "n,raw_survival_log,rescaled_b_n\n";
  for (int n = 0; n <= s.n_max; ++n)
    os << n << ',' << fmt17(s.log_raw_survival(n)) << ',' << fmt17(s.survival[n]) << '\n';
  return os.str();
}

namespace {

std::string coord_header(int d) {
  std::string h;
  for (int i = 1; i <= d; ++i) h += "x" + std::to_string(i) + ",";
  return h;
}

std::string coords(const IVec& p) {
  std::string s;
  for (int i = 0; i < p.size(); ++i) s += std::to_string(p[i]) + ",";
  return s;
}

}  // namespace

std::string harmonic_csv(const HarmonicTables& t) {
  std::ostringstream os;
  os << coord_header(t.box.dim()) << "V,Vprime,U,Uprime\n";
  const bool has_u = !t.U.values.empty();
  for (std::size_t i = 0; i < t.box.size(); ++i) {
    if (t.V[i] == 0.0 && t.Vprime[i] == 0.0) continue;
    os << coords(t.box.point(i)) << fmt17(t.V[i]) << ',' << fmt17(t.Vprime[i]) << ','
       << fmt17(has_u ? t.U[i] : 0.0) << ',' << fmt17(has_u ? t.Uprime[i] : 0.0) << '\n';
  }
  return os.str();
}

std::string mu_csv(const Grid& mu) {
  std::ostringstream os;
  os << coord_header(mu.box.dim()) << "mu\n";
  for (std::size_t i = 0; i < mu.box.size(); ++i)
    if (mu[i] != 0.0) os << coords(mu.box.point(i)) << fmt17(mu[i]) << '\n';
  return os.str();
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_number(double v) {
  // JSON has no literal for non-finite values.
  if (!std::isfinite(v)) return json_string(fmt17(v));
  return fmt17(v);
}

std::string json_array(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + json_number(v[i]);
  return s + "]";
}

std::string json_object(const std::vector<std::pair<std::string, std::string>>& fields) {
  std::string s = "{";
  for (std::size_t i = 0; i < fields.size(); ++i)
    s += (i ? "," : "") + json_string(fields[i].first) + ":" + fields[i].second;
  return s + "}";
}

std::string estimate_json(const McEstimate& e) {
  return json_object({{"estimator", json_string(e.estimator)},
                      {"value", json_number(e.value)},
                      {"std_error", json_number(e.std_error)},
                      {"n_samples", std::to_string(e.n_samples)},
                      {"seed", std::to_string(e.seed)},
                      {"workers", std::to_string(e.workers)}});
}

std::string report_json(const VerificationReport& r) {
  std::string notes = "[";
  for (std::size_t i = 0; i < r.notes.size(); ++i) notes += (i ? "," : "") + json_string(r.notes[i]);
  notes += "]";
  return json_object({{"check", json_string(r.check_name)},
                      {"predicted", json_number(r.predicted)},
                      {"measured", json_number(r.measured)},
                      {"deviation", json_number(r.deviation)},
                      {"tolerance", json_number(r.tolerance)},
                      {"pass", r.pass ? "true" : "false"},
                      {"notes", notes}});
}

std::string reports_jsonl(const std::vector<VerificationReport>& rs) {
  std::string s;
  for (const auto& r : rs) s += report_json(r) + "\n";
  return s;
}

std::string summary_csv(const std::vector<VerificationReport>& rs) {
  std::ostringstream os;
  os << "check,predicted,measured,deviation,tolerance,pass\n";
  for (const auto& r : rs)
    os << r.check_name << ',' << fmt17(r.predicted) << ',' << fmt17(r.measured) << ',' << fmt17(r.deviation) << ','
       << fmt17(r.tolerance) << ',' << (r.pass ? "true" : "false") << '\n';
  return os.str();
}

std::string manifest_json(const Manifest& m) {
  std::string files = "[";
  for (std::size_t i = 0; i < m.files.size(); ++i) files += (i ? "," : "") + json_string(m.files[i]);
  files += "]";
  return json_object({{"command", json_string(m.command)},
                      {"config", json_string(m.config_path)},
                      {"config_hash", json_string(m.config_hash)},
                      {"seed", std::to_string(m.seed)},
                      {"workers", std::to_string(m.workers)},
                      {"version", json_string("conelab 0.1.0")},
                      {"eigen", json_string(std::to_string(EIGEN_WORLD_VERSION) + "." +
                                            std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                            std::to_string(EIGEN_MINOR_VERSION))},
                      {"files", files}}) +
         "\n";
}

}  // namespace conelab
