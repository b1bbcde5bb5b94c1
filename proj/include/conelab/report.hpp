#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "conelab/analysis.hpp"
#include "conelab/simulate.hpp"
#include "conelab/spectral.hpp"

namespace conelab {

// 17 significant digits.
std::string fmt17(double v);

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

void write_text(const std::filesystem::path& path, const std::string& content);

std::string survival_csv(const DpSeries& s);
std::string harmonic_csv(const HarmonicTables& t);
std::string mu_csv(const Grid& mu);
std::string estimate_json(const McEstimate& e);
std::string report_json(const VerificationReport& r);
std::string reports_jsonl(const std::vector<VerificationReport>& rs);
std::string summary_csv(const std::vector<VerificationReport>& rs);

// Flat JSON object from ordered key/value pairs whose values are already
// serialized JSON.
std::string json_object(const std::vector<std::pair<std::string, std::string>>& fields);
std::string json_string(const std::string& s);
std::string json_number(double v);
std::string json_array(const std::vector<double>& v);

struct Manifest {
  std::string command;
  std::string config_path;
  std::string config_hash;
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<std::string> files;
};

std::string manifest_json(const Manifest& m);

}  // namespace conelab
