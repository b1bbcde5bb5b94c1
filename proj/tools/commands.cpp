#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <set>

#include "conelab/report.hpp"

namespace conelab::app {

namespace fs = std::filesystem;

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg)), law_(cfg_.law()), model_(build_model(law_, cfg_.cone)) {}

const CramerData& Pipeline::cramer() {
  if (!cramer_) cramer_ = solve_cramer_point(law_);
  return *cramer_;
}

const WhiteningData& Pipeline::whitening() {
  if (!white_) white_ = whiten(cramer().tilted, cfg_.cone, cfg_.whitening, true);
  return *white_;
}

double Pipeline::p() {
  const auto& w = whitening();
  if (!w.p) throw ConfigError("no closed-form homogeneity degree for " + cfg_.cone.describe());
  return *w.p;
}

const HarmonicTables& Pipeline::tables() {
  if (!tables_) tables_ = tables_with_window(cfg_.harmonic.window);
  return *tables_;
}

HarmonicTables Pipeline::tables_with_window(int L) {
  HarmonicOptions opt = cfg_.harmonic;
  opt.window = L;
  return build_harmonic_tables(cfg_.cone, cramer(), whitening(), opt);
}

const DpSeries& Pipeline::primary_series() {
  if (!primary_) {
    const int n = cfg_.verify.n_hi;
    DpOptions opt;
    opt.window = cfg_.window;
    opt.rescale_by = cramer().c;
    opt.retain = {n / 4, n / 3, n / 2, n - 1, n};
    primary_ = dp_evolve(law_, cfg_.cone, cfg_.start, cfg_.n_max, opt);
  }
  return *primary_;
}

const DpSeries& Pipeline::secondary_series() {
  if (!secondary_) {
    const int n = cfg_.verify.n_hi;
    DpOptions opt;
    opt.window = cfg_.window;
    opt.rescale_by = cramer().c;
    opt.retain = {n - n / 3, n - n / 2};
    secondary_ = dp_evolve(law_, cfg_.cone, cfg_.second_start, cfg_.n_max, opt);
  }
  return *secondary_;
}

std::vector<IVec> Pipeline::driftless_grid() const {
  if (!cfg_.verify.driftless_grid.empty()) return cfg_.verify.driftless_grid;
  const int d = cfg_.cone.dim();
  std::vector<IVec> out;
  if (d == 1) {
    for (int a = -20; a <= 20; ++a) {
      const IVec x = IVec::Constant(1, a);
      if (cfg_.cone.contains(x)) out.push_back(x);
    }
    return out;
  }
  for (int a = 1; a <= 5; ++a)
    for (int b = 1; b <= 4; ++b) {
      IVec x = IVec::Ones(d);
      x[0] = a;
      x[1] = b;
      if (cfg_.cone.contains(x)) out.push_back(x);
    }
  if (out.empty()) throw ConfigError("verify.driftless_grid: default grid has no point in the cone; set it explicitly");
  return out;
}

const std::vector<DpSeries>& Pipeline::driftless_series() {
  if (!driftless_) {
    DpOptions opt;
    opt.window = cfg_.verify.driftless_window;
    std::vector<DpSeries> out;
    for (const IVec& x : driftless_grid()) out.push_back(dp_evolve(cramer().tilted, cfg_.cone, x, cfg_.n_max, opt));
    driftless_ = std::move(out);
  }
  return *driftless_;
}

const QsdResult& Pipeline::qsd(int L) {
  auto it = qsd_.find(L);
  if (it == qsd_.end())
    it = qsd_.emplace(L, qsd_power_iteration(truncated_kernel(law_, cfg_.cone, L), cfg_.qsd.tol, cfg_.qsd.max_iter))
             .first;
  return it->second;
}

VerificationReport Pipeline::verify(const std::string& sel) {
  const int n = cfg_.verify.n_hi;
  const int d = cfg_.cone.dim();
  if (sel == "theorem1")
    return verify_theorem1(primary_series(), secondary_series(), tables(), p(), d, cfg_.verify.n_lo, cfg_.n_max);
  if (sel == "cor_ratio") return verify_cor_ratio(primary_series(), secondary_series(), tables(), n);
  if (sel == "hazard") return verify_hazard(primary_series(), cramer().c, n);
  if (sel == "yaglom") {
    auto r = verify_yaglom(primary_series(), law_, qsd(cfg_.window).mu, n);
    const ReachableCoset coset(law_, cfg_.start, n);
    r.notes.push_back("reference: QSD on window " + std::to_string(cfg_.window) + "; TV to kappa U' on the same coset " +
                      fmt17(normalized_tv(primary_series().table(n), tables().Uprime,
                                          [&](const IVec& y) { return coset.contains(y); })));
    return r;
  }
  if (sel == "exit") return verify_exit(primary_series(), law_, cfg_.cone, tables(), n);
  if (sel == "bridge") return verify_bridge(primary_series(), secondary_series(), cfg_.second_start, n, p(), d);
  if (sel == "expmoment") return verify_expmoment(primary_series(), cramer().c, cfg_.verify.n_lo, cfg_.n_max);
  if (sel == "driftless_bound") {
    std::vector<double> norms;
    for (const IVec& x : driftless_grid()) norms.push_back((whitening().M * to_real(x)).norm());
    return verify_driftless_bound(driftless_series(), norms, p(), cfg_.verify.n_lo, cfg_.n_max);
  }
  throw ConfigError("unknown verify selector '" + sel + "'");
}

namespace {

std::string vec_json(const Vec& v) { return json_array(std::vector<double>(v.data(), v.data() + v.size())); }

std::string mat_json(const Mat& m) {
  std::string s = "[";
  for (int i = 0; i < m.rows(); ++i) s += (i ? "," : "") + vec_json(m.row(i).transpose());
  return s + "]";
}

std::string fmt_vec(const Vec& v) {
  std::string s = "(";
  for (int i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt17(v[i]);
  return s + ")";
}

struct Emitter {
  fs::path dir;
  std::string run_id;
  std::string command;
  std::vector<std::string> files;

  void write(const std::string& suffix, const std::string& content) {
    const std::string name = command + "_" + run_id + suffix;
    write_text(dir / name, content);
    files.push_back(name);
  }
};

int cmd_cramer(Pipeline& pl, Emitter& em, std::ostream& out) {
  const auto& cr = pl.cramer();
  out << "h = " << fmt_vec(cr.h) << "\nc = " << fmt17(cr.c) << "\ntilted law:\n";
  std::vector<std::string> steps;
  for (std::size_t i = 0; i < cr.tilted.size(); ++i) {
    out << "  " << format_point(cr.tilted.step(i)) << "  " << fmt17(cr.tilted.prob(i)) << "\n";
    steps.push_back(json_object({{"step", vec_json(to_real(cr.tilted.step(i)))},
                                 {"prob", json_number(cr.tilted.prob(i))}}));
  }
  std::string arr = "[";
  for (std::size_t i = 0; i < steps.size(); ++i) arr += (i ? "," : "") + steps[i];
  em.write(".json", json_object({{"h", vec_json(cr.h)},
                                 {"c", json_number(cr.c)},
                                 {"grad_residual", json_number(cr.grad_residual)},
                                 {"iterations", std::to_string(cr.iterations)},
                                 {"tilted", arr + "]"}}) +
                        "\n");
  return 0;
}

int cmd_whiten(Pipeline& pl, Emitter& em, std::ostream& out) {
  const auto& w = pl.whitening();
  out << "cov =\n" << w.cov << "\nM =\n" << w.M << "\nalpha = " << fmt17(w.alpha) << "\n";
  if (w.cone_image.kind == ConeImage::Kind::wedge2d) out << "image opening = " << fmt17(w.cone_image.opening) << "\n";
  out << "p = " << (w.p ? fmt17(*w.p) : std::string("to be fitted")) << "\n";
  em.write(".json", json_object({{"cov", mat_json(w.cov)},
                                 {"M", mat_json(w.M)},
                                 {"alpha", json_number(w.alpha)},
                                 {"image_opening", json_number(w.cone_image.opening)},
                                 {"p", w.p ? json_number(*w.p) : "null"}}) +
                        "\n");
  return 0;
}

int cmd_harmonic(Pipeline& pl, Emitter& em, std::ostream& out) {
  const auto& t = pl.tables();
  out << "window " << pl.config().harmonic.window << ", iterations " << t.iterations_V << "/" << t.iterations_Vprime
      << ", converged " << (t.converged ? "yes" : "no") << "\nkappa = " << fmt17(t.kappa)
      << "\ntail bound = " << fmt17(t.tail_bound) << "\n";
  for (const auto& note : t.notes) out << "note: " << note << "\n";
  em.write(".csv", harmonic_csv(t));
  em.write(".json", json_object({{"window", std::to_string(pl.config().harmonic.window)},
                                 {"p", json_number(t.u.p)},
                                 {"kappa", json_number(t.kappa)},
                                 {"tail_bound", json_number(t.tail_bound)},
                                 {"iterations_V", std::to_string(t.iterations_V)},
                                 {"iterations_Vprime", std::to_string(t.iterations_Vprime)},
                                 {"residual_V", json_number(t.residual_V)},
                                 {"residual_Vprime", json_number(t.residual_Vprime)},
                                 {"converged", t.converged ? "true" : "false"}}) +
                        "\n");
  return 0;
}

int cmd_dp(Pipeline& pl, Emitter& em, std::ostream& out) {
  const auto& s = pl.primary_series();
  const auto& cfg = pl.config();
  const TailFit fit = fit_tail(s, FitMode::drifted, cfg.verify.n_lo, cfg.n_max);
  out << "P(tau > 1) = " << fmt17(std::exp(s.log_raw_survival(std::min(1, s.n_max)))) << "\n"
      << "c_hat = " << fmt17(fit.c_hat) << "\nexponent_hat = " << fmt17(fit.exponent_hat)
      << "\nconstant_hat = " << fmt17(fit.constant_hat) << "\nmax edge ratio = " << fmt17(s.max_edge_ratio) << "\n";
  for (const auto& dgn : fit.diagnostics) out << "note: " << dgn << "\n";
  std::vector<std::pair<std::string, std::string>> fields{
      {"x0", vec_json(to_real(s.x0))},
      {"n_max", std::to_string(s.n_max)},
      {"rescale_by", json_number(s.rescale_by)},
      {"c_hat", json_number(fit.c_hat)},
      {"exponent_hat", json_number(fit.exponent_hat)},
      {"constant_hat", json_number(fit.constant_hat)},
      {"fit_window", "[" + std::to_string(fit.n_lo) + "," + std::to_string(fit.n_hi) + "]"},
      {"max_edge_ratio", json_number(s.max_edge_ratio)}};
  if (!pl.whitening().p)
    fields.emplace_back("fitted_p", json_number(fitted_homogeneity_degree(fit, cfg.cone.dim())));
  em.write(".csv", survival_csv(s));
  em.write(".json", json_object(fields) + "\n");
  return 0;
}

int cmd_simulate(Pipeline& pl, Emitter& em, std::ostream& out, const McOptions& mc) {
  const auto& cfg = pl.config();
  const McEstimate direct = mc_survival(pl.law(), cfg.cone, cfg.start, cfg.simulate.n, mc);
  const McEstimate is = is_survival(pl.cramer(), cfg.cone, cfg.start, cfg.simulate.n, mc);
  out << "direct: " << fmt17(direct.value) << " +- " << fmt17(direct.std_error) << " (" << direct.hits
      << " surviving paths)\nimportance: " << fmt17(is.value) << " +- " << fmt17(is.std_error) << "\n";
  em.write(".json", estimate_json(direct) + "\n" + estimate_json(is) + "\n");

  const HarmonicTables t = pl.tables_with_window(cfg.simulate.z_window);
  const ZEnsemble z =
      z_chain_ensemble(pl.law(), cfg.cone, t, cfg.start, cfg.simulate.z_steps, cfg.simulate.z_paths, mc.seed);
  out << "Z chain: " << z.paths << " paths, " << z.truncated << " truncated, row sums in [" << fmt17(z.min_row_sum)
      << ", " << fmt17(z.max_row_sum) << "]\n";
  std::string csv = "k,mean_norm,se_norm\n";
  for (std::size_t k = 0; k < z.mean_norm.size(); ++k)
    csv += std::to_string(k) + "," + fmt17(z.mean_norm[k]) + "," + fmt17(z.se_norm[k]) + "\n";
  em.write("_zchain.csv", csv);
  return 0;
}

int cmd_qsd(Pipeline& pl, Emitter& em, std::ostream& out) {
  const auto& cfg = pl.config();
  std::vector<std::string> rows;
  int largest = 0;
  for (int L : cfg.qsd.windows) {
    const auto& q = pl.qsd(L);
    out << "L = " << L << ": lambda = " << fmt17(q.lambda) << ", residual " << fmt17(q.residual) << ", "
        << q.iterations << " iterations" << (q.converged ? "" : " (not converged)") << "\n";
    for (const auto& note : q.notes) out << "note: " << note << "\n";
    rows.push_back(json_object({{"L", std::to_string(L)},
                                {"lambda", json_number(q.lambda)},
                                {"residual", json_number(q.residual)},
                                {"iterations", std::to_string(q.iterations)},
                                {"converged", q.converged ? "true" : "false"}}));
    largest = std::max(largest, L);
  }
  std::string all;
  for (const auto& r : rows) all += r + "\n";
  em.write(".json", all);
  em.write(".csv", mu_csv(pl.qsd(largest).mu));
  return 0;
}

int cmd_verify(Pipeline& pl, Emitter& em, std::ostream& out, const std::string& selector) {
  std::vector<std::string> sels;
  if (selector == "all") sels = kSelectors;
  else if (std::find(kSelectors.begin(), kSelectors.end(), selector) != kSelectors.end()) sels = {selector};
  else throw ConfigError("unknown verify selector '" + selector + "'");
  std::vector<VerificationReport> reports;
  bool ok = true;
  for (const auto& s : sels) {
    reports.push_back(pl.verify(s));
    const auto& r = reports.back();
    ok = ok && r.pass;
    out << (r.pass ? "PASS " : "FAIL ") << r.check_name << ": measured " << fmt17(r.measured) << ", predicted "
        << fmt17(r.predicted) << ", deviation " << fmt17(r.deviation) << " (tolerance " << fmt17(r.tolerance)
        << ")\n";
    for (const auto& note : r.notes) out << "  " << note << "\n";
  }
  em.write(".jsonl", reports_jsonl(reports));
  em.write(".csv", summary_csv(reports));
  return ok ? 0 : 1;
}

}  // namespace

int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    static const std::set<std::string> commands{"cramer", "whiten", "harmonic", "dp", "simulate", "qsd", "verify"};
    if (!commands.count(inv.command)) throw ConfigError("unknown command '" + inv.command + "'");
    std::string raw;
    RunConfig cfg = load_config(inv.config_path, &raw);
    if (inv.seed) cfg.seed = *inv.seed;
    if (inv.workers) {
      if (*inv.workers < 1) throw ConfigError("--workers must be positive");
      cfg.workers = *inv.workers;
    }
    if (inv.out_dir) cfg.output = *inv.out_dir;

    Pipeline pl(cfg);
    for (const auto& note : pl.model().notes) err << "note: " << note << "\n";

    const std::string cfg_hash = hex64(fnv1a(raw));
    const std::string key = raw + "\n" + inv.command + " " + inv.selector + "\n" + std::to_string(cfg.seed) + " " +
                            std::to_string(cfg.workers);
    Emitter em{cfg.output, hex64(fnv1a(key)).substr(0, 12), inv.command, {}};
    McOptions mc{cfg.simulate.n_samples, cfg.seed, cfg.workers};

    int status = 0;
    if (inv.command == "cramer") status = cmd_cramer(pl, em, out);
    else if (inv.command == "whiten") status = cmd_whiten(pl, em, out);
    else if (inv.command == "harmonic") status = cmd_harmonic(pl, em, out);
    else if (inv.command == "dp") status = cmd_dp(pl, em, out);
    else if (inv.command == "simulate") status = cmd_simulate(pl, em, out, mc);
    else if (inv.command == "qsd") status = cmd_qsd(pl, em, out);
    else status = cmd_verify(pl, em, out, inv.selector.empty() ? "all" : inv.selector);

    Manifest m{inv.command + (inv.selector.empty() ? "" : " " + inv.selector), inv.config_path, cfg_hash, cfg.seed,
               cfg.workers, em.files};
    write_text(em.dir / ("manifest_" + em.run_id + ".json"), manifest_json(m));
    return status;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const WindowTooSmall& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace conelab::app
