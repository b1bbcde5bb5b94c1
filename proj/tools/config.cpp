#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace conelab::app {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

void allow_only(const json& j, const std::string& path, const std::set<std::string>& keys) {
  if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) fail(path.empty() ? k : path + "." + k, "unknown key");
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

long long get_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) fail(key, "expected an integer");
  return j.get<long long>();
}

int get_pos_int(const json& j, const std::string& key) {
  const long long v = get_int(j, key);
  if (v < 1 || v > 1'000'000'000) fail(key, "expected a positive integer");
  return static_cast<int>(v);
}

double get_real(const json& j, const std::string& key) {
  if (!j.is_number()) fail(key, "expected a number");
  return j.get<double>();
}

IVec get_point(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) fail(key, "expected a nonempty integer array");
  IVec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<int>(i)] = static_cast<int>(get_int(j[i], key + "[" + std::to_string(i) + "]"));
  return v;
}

Vec get_vector(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) fail(key, "expected a nonempty numeric array");
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = get_real(j[i], key + "[" + std::to_string(i) + "]");
  return v;
}

ConeSpec parse_cone(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type")) fail(join(path, "type"), "missing");
  const json& t = j["type"];
  if (!t.is_string()) fail(join(path, "type"), "expected a string");
  const std::string type = t.get<std::string>();
  try {
    if (type == "orthant") {
      allow_only(j, path, {"type", "dim"});
      if (!j.contains("dim")) fail(join(path, "dim"), "missing");
      return ConeSpec::orthant(get_pos_int(j["dim"], join(path, "dim")));
    }
    if (type == "wedge") {
      allow_only(j, path, {"type", "opening", "rotation"});
      if (!j.contains("opening")) fail(join(path, "opening"), "missing");
      const double rot = j.contains("rotation") ? get_real(j["rotation"], join(path, "rotation")) : 0.0;
      return ConeSpec::wedge2d(get_real(j["opening"], join(path, "opening")), rot);
    }
    if (type == "halfspace") {
      allow_only(j, path, {"type", "normal"});
      if (!j.contains("normal")) fail(join(path, "normal"), "missing");
      return ConeSpec::halfspace(get_vector(j["normal"], join(path, "normal")));
    }
  } catch (const ModelRejected&) {
    throw;
  } catch (const ConfigError& e) {
    if (std::string(e.what()).rfind("config key", 0) == 0) throw;
    fail(path, e.what());
  }
  fail(join(path, "type"), "unknown cone type '" + type + "'");
}

}  // namespace

double parse_probability(const std::string& text) {
  const auto slash = text.find('/');
  std::size_t used = 0;
  try {
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
    const std::string a = text.substr(0, slash), b = text.substr(slash + 1);
    const long long p = std::stoll(a, &used);
    if (used != a.size()) throw std::invalid_argument(text);
    const long long q = std::stoll(b, &used);
    if (used != b.size() || q <= 0) throw std::invalid_argument(text);
    // Both integers are exact in double below 2^53, so this is one rounding.
    return static_cast<double>(p) / static_cast<double>(q);
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse probability '" + text + "'");
  }
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  allow_only(j, "", {"name", "model", "whitening", "start", "second_start", "window", "n_max", "harmonic", "simulate",
                     "qsd", "verify", "seed", "workers", "output"});
  RunConfig c;
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail("name", "expected a string");
    c.name = j["name"].get<std::string>();
  }

  if (!j.contains("model")) fail("model", "missing");
  const json& m = j["model"];
  allow_only(m, "model", {"steps", "cone"});
  if (!m.contains("steps") || !m["steps"].is_array() || m["steps"].empty()) fail("model.steps", "expected a nonempty array");
  for (std::size_t i = 0; i < m["steps"].size(); ++i) {
    const std::string key = "model.steps[" + std::to_string(i) + "]";
    const json& s = m["steps"][i];
    allow_only(s, key, {"step", "prob"});
    if (!s.contains("step")) fail(key + ".step", "missing");
    if (!s.contains("prob")) fail(key + ".prob", "missing");
    c.steps.push_back(get_point(s["step"], key + ".step"));
    const json& p = s["prob"];
    double v = 0.0;
    if (p.is_string()) {
      try {
        v = parse_probability(p.get<std::string>());
      } catch (const ConfigError& e) {
        fail(key + ".prob", e.what());
      }
    } else {
      v = get_real(p, key + ".prob");
    }
    c.probs.push_back(v);
  }
  if (!m.contains("cone")) fail("model.cone", "missing");
  c.cone = parse_cone(m["cone"], "model.cone");
  try {
    (void)c.law();
  } catch (const ModelRejected&) {
    throw;
  } catch (const ConfigError& e) {
    fail("model.steps", e.what());
  }

  const int d = c.cone.dim();
  if (j.contains("whitening")) {
    const json& w = j["whitening"];
    if (w == "general") c.whitening = WhiteningMode::general;
    else if (w == "example2d") c.whitening = WhiteningMode::example2d;
    else fail("whitening", "expected \"general\" or \"example2d\"");
  }
  c.start = j.contains("start") ? get_point(j["start"], "start") : IVec::Ones(d);
  c.second_start = j.contains("second_start") ? get_point(j["second_start"], "second_start") : IVec(2 * c.start);
  if (c.start.size() != d) fail("start", "dimension differs from the cone");
  if (c.second_start.size() != d) fail("second_start", "dimension differs from the cone");
  if (!c.cone.contains(c.start)) fail("start", "point is not in the open cone");
  if (!c.cone.contains(c.second_start)) fail("second_start", "point is not in the open cone");
  if (j.contains("window")) c.window = get_pos_int(j["window"], "window");
  if (j.contains("n_max")) c.n_max = get_pos_int(j["n_max"], "n_max");

  if (j.contains("harmonic")) {
    const json& h = j["harmonic"];
    allow_only(h, "harmonic", {"window", "max_iter", "tol"});
    if (h.contains("window")) c.harmonic.window = get_pos_int(h["window"], "harmonic.window");
    if (h.contains("max_iter")) c.harmonic.max_iter = get_pos_int(h["max_iter"], "harmonic.max_iter");
    if (h.contains("tol")) c.harmonic.tol = get_real(h["tol"], "harmonic.tol");
  }
  if (j.contains("simulate")) {
    const json& s = j["simulate"];
    allow_only(s, "simulate", {"n", "n_samples", "z_steps", "z_paths", "z_window"});
    if (s.contains("n")) c.simulate.n = get_pos_int(s["n"], "simulate.n");
    if (s.contains("n_samples")) {
      c.simulate.n_samples = get_int(s["n_samples"], "simulate.n_samples");
      if (c.simulate.n_samples < 1) fail("simulate.n_samples", "expected a positive integer");
    }
    if (s.contains("z_steps")) c.simulate.z_steps = get_pos_int(s["z_steps"], "simulate.z_steps");
    if (s.contains("z_paths")) c.simulate.z_paths = get_pos_int(s["z_paths"], "simulate.z_paths");
    if (s.contains("z_window")) c.simulate.z_window = get_pos_int(s["z_window"], "simulate.z_window");
  }
  if (j.contains("qsd")) {
    const json& q = j["qsd"];
    allow_only(q, "qsd", {"windows", "tol", "max_iter"});
    if (q.contains("windows")) {
      const IVec w = get_point(q["windows"], "qsd.windows");
      c.qsd.windows.assign(w.data(), w.data() + w.size());
      for (int v : c.qsd.windows)
        if (v < 1) fail("qsd.windows", "expected positive radii");
    }
    if (q.contains("tol")) c.qsd.tol = get_real(q["tol"], "qsd.tol");
    if (q.contains("max_iter")) c.qsd.max_iter = get_pos_int(q["max_iter"], "qsd.max_iter");
  }
  if (j.contains("verify")) {
    const json& v = j["verify"];
    allow_only(v, "verify", {"n_lo", "n_hi", "driftless_window", "driftless_grid"});
    if (v.contains("n_lo")) c.verify.n_lo = get_pos_int(v["n_lo"], "verify.n_lo");
    if (v.contains("n_hi")) c.verify.n_hi = get_pos_int(v["n_hi"], "verify.n_hi");
    if (v.contains("driftless_window"))
      c.verify.driftless_window = get_pos_int(v["driftless_window"], "verify.driftless_window");
    if (v.contains("driftless_grid")) {
      const json& g = v["driftless_grid"];
      if (!g.is_array() || g.empty()) fail("verify.driftless_grid", "expected a nonempty array of points");
      for (std::size_t i = 0; i < g.size(); ++i) {
        const std::string key = "verify.driftless_grid[" + std::to_string(i) + "]";
        const IVec p = get_point(g[i], key);
        if (p.size() != d || !c.cone.contains(p)) fail(key, "point is not in the open cone");
        c.verify.driftless_grid.push_back(p);
      }
    }
  }
  if (c.verify.n_hi > c.n_max) fail("verify.n_hi", "exceeds n_max");
  if (c.n_max < 4 * c.verify.n_lo) fail("n_max", "must be at least 4 * verify.n_lo");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("workers")) c.workers = get_pos_int(j["workers"], "workers");
  if (j.contains("output")) {
    if (!j["output"].is_string()) fail("output", "expected a string");
    c.output = j["output"].get<std::string>();
  }
  return c;
}

RunConfig load_config(const std::string& path, std::string* raw_text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  if (raw_text) *raw_text = os.str();
  return parse_config(os.str());
}

}  // namespace conelab::app
