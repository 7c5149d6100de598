#include "freelight/cli.hpp"

#include "config.hpp"
#include "output.hpp"

#include "freelight/electron.hpp"
#include "freelight/emission.hpp"
#include "freelight/fock.hpp"
#include "freelight/synthesis.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#ifndef FREELIGHT_VERSION
#define FREELIGHT_VERSION "unknown"
#endif

namespace freelight::cli {

namespace {

constexpr double kPi = std::numbers::pi;

// Coarse progress on stderr: at most ~10 lines per scan.
class Progress {
 public:
  Progress(std::ostream& err, std::string label, long total) : err_(err), label_(std::move(label)), total_(total) {}
  void tick() {
    ++done_;
    const long step = std::max(1L, total_ / 10);
    if (done_ % step == 0 || done_ == total_) err_ << label_ << ": " << done_ << "/" << total_ << "\n";
  }

 private:
  std::ostream& err_;
  std::string label_;
  long total_;
  long done_ = 0;
};

cplx parseComplex(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(where + ": expected a number or [re, im]");
}

ElectronPulse parsePulse(Fields& f) {
  IELSStage st;
  st.beta_abs = f.number("beta_abs", 0.0);
  st.beta_phase = f.number("beta_phase", 0.0);
  st.harmonic = f.integer("harmonic", 1);
  st.drift = f.number("drift", 0.0);
  if (st.beta_abs < 0.0) throw ConfigError("pulse.beta_abs must be >= 0");
  if (st.harmonic < 1) throw ConfigError("pulse.harmonic must be >= 1");
  ElectronPulse p;
  p.spectrum = ielsModulate(st);
  p.sigma_t = f.optionalNumber("sigma_t").value_or(kInf);
  p.delta_t = f.number("delta_t", 0.0);
  p.validate();
  return p;
}

// Fields consumed by parseTarget for the given kind.
TargetState parseTarget(Fields& f, const std::string& kind, std::optional<double> sweep = std::nullopt) {
  if (kind == "squeezed") return SqueezedVacuum{sweep.value_or(f.number("r", 0.5))};
  if (kind == "cat" || kind == "triangular_cat") {
    cplx a = sweep ? cplx(*sweep, 0.0) : (f.has("alpha") ? parseComplex(f.raw("alpha"), "target.alpha") : cplx(1.0));
    const double th = f.number("theta", kPi / 2.0);
    if (kind == "cat") return Cat{a, th};
    return TriangularCat{a, th};
  }
  if (kind == "custom") {
    const json& v = f.raw("amps");
    if (!v.is_array() || v.empty()) throw ConfigError("target.amps: expected a non-empty list");
    CustomTarget t;
    for (const auto& e : v) t.amps.push_back(parseComplex(e, "target.amps"));
    return t;
  }
  throw ConfigError("unknown target kind '" + kind + "'");
}

struct WignerSpec {
  std::vector<double> xs, ps;
};

WignerSpec parseWignerGrid(Fields& f) {
  std::vector<double> def;
  for (int i = 0; i <= 100; ++i) def.push_back(-5.0 + 0.1 * i);
  return {f.values("x", def), f.values("p", def)};
}

Table wignerTable(const PhotonicState& st, const WignerSpec& spec) {
  const WignerGrid g = wigner(st, spec.xs, spec.ps);
  Table t{{"x", "p", "w"}, {}};
  for (size_t i = 0; i < g.xs.size(); ++i)
    for (size_t j = 0; j < g.ps.size(); ++j) t.add({g.xs[i], g.ps[j], g.values(i, j)});
  return t;
}

json wignerSummary(const PhotonicState& st, const WignerSpec& spec) {
  const WignerGrid g = wigner(st, spec.xs, spec.ps);
  return {{"integral", g.integral()}, {"min", g.values.minCoeff()}, {"max", g.values.maxCoeff()}};
}

struct Context {
  Fields& cfg;
  json effective;  // echoed into metadata
  std::string command;
  std::string out_dir;
  std::string format;
  std::uint64_t seed = 0;
  bool full_budget = false;
  std::ostream& err;

  Writer writer() const {
    json meta{{"artifact", "freelight"}, {"version", FREELIGHT_VERSION}, {"command", command},
              {"seed", seed},            {"config", effective}};
    return Writer(out_dir, format, meta);
  }
};

void requireNonNegative(const std::vector<double>& v, const std::string& what) {
  for (double d : v)
    if (d < 0.0) throw ConfigError(what + " must be >= 0");
}

json cmdCF(Context& ctx) {
  Fields& f = ctx.cfg;
  const std::string mode = f.choice("mode", "iels", {"iels", "prefilter"});
  const auto betas = f.values("beta_abs", mode == "iels" ? std::vector<double>{0.0, 8.0} : std::vector<double>{20.0});
  const auto drifts = f.values("drift", {0.0, 0.5});
  const auto orders = f.integers("orders", {1, 2});
  const double phase = f.number("beta_phase", 0.0);
  const int harmonic = f.integer("harmonic", 1);
  const auto sigma = f.optionalNumber("sigma_t");
  const double delta_t = f.number("delta_t", 0.0);
  const double delta_max = f.number("delta_max", 50.0);
  const auto delta_d = f.values("delta_d", {1.0, 100.0});
  f.finish();
  requireNonNegative(betas, "beta_abs");
  if (harmonic < 1) throw ConfigError("harmonic must be >= 1");
  if (sigma && !(*sigma > 0.0)) throw ConfigError("sigma_t must be > 0");
  if (mode == "prefilter")
    for (double d : delta_d)
      if (!(d > 0.0)) throw ConfigError("delta_d must be > 0");

  Table t;
  if (mode == "iels")
    t.columns = {"beta_abs", "drift", "m", "re", "im", "abs2"};
  else
    t.columns = {"beta_abs", "delta_d", "drift", "m", "re", "im", "abs2", "success"};
  std::map<int, double> peak;
  const long total = static_cast<long>(betas.size() * drifts.size() * (mode == "iels" ? 1 : delta_d.size()));
  Progress prog(ctx.err, "cf", total);
  for (double b : betas) {
    if (mode == "iels") {
      for (double d : drifts) {
        ElectronPulse p{ielsModulate({b, phase, harmonic, d}), sigma.value_or(kInf), delta_t};
        for (int m : orders) {
          const cplx M = coherenceFactor(p, m);
          t.add({b, d, double(m), M.real(), M.imag(), std::norm(M)});
          peak[m] = std::max(peak[m], std::norm(M));
        }
        prog.tick();
      }
    } else {
      for (double dd : delta_d)
        for (double d : drifts) {
          for (int m : orders) {
            const auto r = prefilterCF({b, phase, harmonic, d}, {delta_max, dd}, m, sigma, delta_t);
            t.add({b, dd, d, double(m), r.cf.real(), r.cf.imag(), std::norm(r.cf), r.success});
            peak[m] = std::max(peak[m], std::norm(r.cf));
          }
          prog.tick();
        }
    }
  }
  Writer w = ctx.writer();
  w.table("cf", t);
  json pk = json::object();
  for (const auto& [m, v] : peak) pk[std::to_string(m)] = v;
  return {{"files", w.files()}, {"rows", t.rows.size()}, {"max_abs2", pk}};
}

json cmdEmit(Context& ctx) {
  Fields& f = ctx.cfg;
  const std::string mode = f.choice("mode", "window", {"window", "prefilter"});
  const ElectronPulse pulse = parsePulse(f.object("pulse"));
  const double beta0 = f.number("beta0", 1.0);
  const int n_max = f.integer("n_max", -1);
  const int s = f.integer("s", 0);
  const auto scan = f.values("delta_d", mode == "window" ? std::vector<double>{1e-3, 0.01, 0.1, 1.0, 10.0}
                                                         : std::vector<double>{1.0, 10.0, 100.0});
  const double delta_max = f.number("delta_max", 50.0);
  const int electrons = f.integer("electrons", 1);
  Fields& wf = f.object("wigner");
  const auto points = wf.has("points") ? wf.integers("points", {}) : std::vector<int>{};
  const WignerSpec grid = parseWignerGrid(wf);
  f.finish();
  if (beta0 < 0.0) throw ConfigError("beta0 must be >= 0");
  if (electrons < 1 || electrons > 3) throw ConfigError("electrons must be in 1..3");
  if (mode == "window" && electrons != 1) throw ConfigError("window mode supports one electron");
  for (int i : points)
    if (i < 0 || i >= static_cast<int>(scan.size())) throw ConfigError("wigner.points: index out of range");

  Table t{{"delta_d", "purity", "field_abs", "field_re", "field_im", "mean_n", "p_success"}, {}};
  std::vector<PhotonicState> states;
  Progress prog(ctx.err, "emit", static_cast<long>(scan.size()));
  double best_purity = 0.0;
  for (double dd : scan) {
    FilterOutcome out{PhotonicState::vacuum(0), 1.0};
    if (mode == "window") {
      out = emitSingleWindow(pulse, beta0, {s, dd}, n_max);
    } else {
      double success = 0.0;
      ElectronPulse pre = pulse;
      pre.spectrum = prefilterSpectrum(pulse.spectrum, {delta_max, dd}, &success);
      if (!(success > 0.0)) throw std::runtime_error("pre-filter keeps no electron weight");
      pre.spectrum = pre.spectrum.normalized();
      out = FilterOutcome{emitNoFilter(std::vector<ElectronPulse>(electrons, pre), beta0, n_max),
                          std::pow(success, electrons)};
    }
    const cplx a = expectationField(out);
    const double pur = purity(out.state);
    best_purity = std::max(best_purity, pur);
    t.add({dd, pur, std::abs(a), a.real(), a.imag(), expectation(out.state, Observable::Number).real(), out.p_success});
    states.push_back(std::move(out.state));
    prog.tick();
  }
  Writer w = ctx.writer();
  w.table("emit", t);
  json wsum = json::array();
  for (int i : points) {
    w.table("wigner_" + std::to_string(i), wignerTable(states[i], grid));
    wsum.push_back({{"index", i}, {"delta_d", scan[i]}, {"grid", wignerSummary(states[i], grid)}});
  }
  return {{"files", w.files()}, {"rows", t.rows.size()}, {"max_purity", best_purity}, {"wigner", wsum}};
}

json cmdStats(Context& ctx) {
  Fields& f = ctx.cfg;
  const std::string mode = f.choice("mode", "cf_plane", {"cf_plane", "iels"});
  const int N = f.integer("electrons", 6);
  const double beta0 = f.number("beta0", 1.0);
  const auto im1 = f.values("im_m1", {-1.0, -0.5, 0.0, 0.5, 1.0});
  const auto re2 = f.values("re_m2", {-1.0, -0.5, 0.0, 0.5, 1.0});
  const auto betas = f.values("beta_abs", {0.0, 1.0, 2.0, 3.0, 4.0});
  const auto drifts = f.values("drift", {0.0, 0.125, 0.25, 0.375, 0.5});
  const double phase = f.number("beta_phase", 0.0);
  const int harmonic = f.integer("harmonic", 1);
  f.finish();
  if (N < 1) throw ConfigError("electrons must be >= 1");
  if (beta0 < 0.0) throw ConfigError("beta0 must be >= 0");
  requireNonNegative(betas, "beta_abs");
  if (harmonic < 1) throw ConfigError("harmonic must be >= 1");

  Table t;
  t.columns = mode == "cf_plane" ? std::vector<std::string>{"im_m1", "re_m2", "intensity", "g_ratio", "fluct", "physical"}
                                 : std::vector<std::string>{"beta_abs", "drift", "intensity", "g_ratio", "fluct", "physical"};
  long physical = 0;
  double gmin = kInf, gmax = -kInf;
  auto record = [&](double a, double b, const EmissionStats& st) {
    t.add({a, b, st.intensity, st.gRatio(), st.fluct, st.physical ? 1.0 : 0.0});
    if (st.physical) {
      ++physical;
      gmin = std::min(gmin, st.gRatio());
      gmax = std::max(gmax, st.gRatio());
    }
  };
  if (mode == "cf_plane") {
    Progress prog(ctx.err, "stats", static_cast<long>(im1.size()));
    for (double y : im1) {
      for (double x : re2) {
        const auto table = CoherenceTable::fromValues({1.0, cplx(0.0, y), cplx(x, 0.0)});
        std::vector<CoherenceTable> ts(N, table);
        record(y, x, computeEmissionStats(ts, beta0));
      }
      prog.tick();
    }
  } else {
    Progress prog(ctx.err, "stats", static_cast<long>(betas.size()));
    for (double b : betas) {
      for (double d : drifts) {
        const CoherenceTable table(ElectronPulse{ielsModulate({b, phase, harmonic, d}), kInf, 0.0}, 2);
        record(b, d, computeEmissionStats(std::vector<CoherenceTable>(N, table), beta0));
      }
      prog.tick();
    }
  }
  Writer w = ctx.writer();
  w.table("stats", t);
  json out{{"files", w.files()}, {"rows", t.rows.size()}, {"physical_rows", physical}};
  if (physical > 0) out["g_ratio_range"] = {gmin, gmax};
  return out;
}

json cmdCat(Context& ctx) {
  Fields& f = ctx.cfg;
  const auto betas = f.values("beta_abs", {1.0, 5.0, 10.0, 15.0, 20.0});
  const auto ss = f.integers("s", {-5});
  const double beta0 = f.number("beta0", 2.0);
  const double phase = f.number("beta_phase", 0.0);
  const double drift = f.number("drift", 0.0);
  const int n_max = f.integer("n_max", -1);
  const int n_trunc = f.integer("n_max_trunc", 20);
  Fields& wf = f.object("wigner");
  std::vector<std::pair<double, int>> points;
  if (wf.has("points")) {
    const json& v = wf.raw("points");
    if (!v.is_array()) throw ConfigError("wigner.points: expected a list of [beta_abs, s]");
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number_integer())
        throw ConfigError("wigner.points: entries must be [beta_abs, s]");
      points.emplace_back(e[0].get<double>(), e[1].get<int>());
    }
  }
  const WignerSpec grid = parseWignerGrid(wf);
  f.finish();
  requireNonNegative(betas, "beta_abs");
  if (beta0 < 0.0) throw ConfigError("beta0 must be >= 0");
  if (n_trunc < 0) throw ConfigError("n_max_trunc must be >= 0");

  const cplx chi = cplx(0.0, -1.0) * beta0 * std::polar(1.0, phase);
  auto generate = [&](double b, int s) {
    return emitExact({ielsModulate({b, phase, 1, drift})}, beta0, {s}, n_max);
  };
  auto catFor = [&](double b, int s, int dim_max) {
    return targetFactory(Cat{chi, s * kPi + kPi / 2.0 - 4.0 * b}, dim_max);
  };

  Table t{{"beta_abs", "s", "fidelity", "p_success", "theta", "pf_closed_form", "pf_direct"}, {}};
  double best = 0.0, max_pf_err = 0.0;
  Progress prog(ctx.err, "cat", static_cast<long>(betas.size()));
  for (double b : betas) {
    for (int s : ss) {
      const double theta = s * kPi + kPi / 2.0 - 4.0 * b;
      const CatClosedForm cf = catClosedForm(b, phase, s, n_trunc, beta0);
      const double direct = catDividingFactorDirect(b, s, n_trunc, beta0);
      max_pf_err = std::max(max_pf_err, std::abs(cf.pf_closed_form - direct));
      double fid = std::nan(""), p = 0.0;
      try {
        const FilterOutcome out = generate(b, s);
        fid = fidelity(out.state, catFor(b, s, out.state.nMax()));
        p = out.p_success;
        best = std::max(best, fid);
      } catch (const std::runtime_error& e) {
        if (std::string(e.what()).rfind("empty", 0) != 0) throw;
      }
      t.add({b, double(s), fid, p, theta, cf.pf_closed_form, direct});
    }
    prog.tick();
  }
  Writer w = ctx.writer();
  w.table("cat", t);
  json wsum = json::array();
  for (size_t k = 0; k < points.size(); ++k) {
    const auto [b, s] = points[k];
    const FilterOutcome out = generate(b, s);
    w.table("wigner_" + std::to_string(k), wignerTable(out.state, grid));
    wsum.push_back({{"beta_abs", b},
                    {"s", s},
                    {"fidelity", fidelity(out.state, catFor(b, s, out.state.nMax()))},
                    {"grid", wignerSummary(out.state, grid)}});
  }
  return {{"files", w.files()}, {"rows", t.rows.size()}, {"max_fidelity", best},
          {"max_pf_abs_error", max_pf_err}, {"wigner", wsum}};
}

json cmdOptimize(Context& ctx) {
  Fields& f = ctx.cfg;
  Fields& tf = f.object("target");
  const std::string kind = tf.choice("kind", "squeezed", {"squeezed", "cat", "triangular_cat"});
  const auto sweep = f.values("sweep", kind == "squeezed" ? std::vector<double>{0.1, 0.5, 0.9, 1.2}
                                                          : std::vector<double>{0.5, 1.0, 1.5, 2.0});
  // Target fields other than the swept parameter.
  const TargetState probe = parseTarget(tf, kind, sweep.front());
  (void)probe;
  const auto Ms = f.integers("M", {1, 2, 4, 6});
  SynthesisProblem base;
  base.beta0 = f.number("beta0", 1.0);
  base.harmonic = f.integer("harmonic", 1);
  base.n_max_coeff = f.integer("n_max_coeff", 10);
  base.restarts = f.integer("restarts", 64);
  base.max_iters = f.integer("max_iters", 500);
  base.beta_cap = f.number("beta_cap", 20.0);
  base.s_min = f.integer("s_min", 1);
  base.s_max = f.integer("s_max", 0);
  base.working_truncation = f.integer("working_truncation", -1);
  base.seed = ctx.seed;
  Fields& wf = f.object("wigner");
  const auto points = wf.has("points") ? wf.integers("points", {}) : std::vector<int>{};
  const WignerSpec grid = parseWignerGrid(wf);
  f.finish();
  if (ctx.full_budget) {
    base.restarts = 3000;
    base.max_iters = 2000;
  }
  for (int m : Ms)
    if (m < 1) throw ConfigError("M entries must be >= 1");
  for (int i : points)
    if (i < 0 || i >= static_cast<int>(sweep.size())) throw ConfigError("wigner.points: index out of range");
  base.validate();

  Writer w = ctx.writer();
  json results = json::array();
  json summary = json::array();
  for (int M : Ms) {
    Table t;
    t.columns = {"sweep_param", "M", "fidelity", "p_success", "s", "drift"};
    for (int i = 1; i <= M; ++i) t.columns.push_back("beta_abs_" + std::to_string(i));
    for (int i = 1; i <= M; ++i) t.columns.push_back("beta_phase_" + std::to_string(i));
    double fmin = 1.0, fmax = 0.0, bmax = 0.0;
    for (size_t k = 0; k < sweep.size(); ++k) {
      SynthesisProblem pr = base;
      pr.M = M;
      pr.target = parseTarget(tf, kind, sweep[k]);
      const SynthesisResult r = optimize(pr);
      ctx.err << "optimize: M=" << M << " " << (kind == "squeezed" ? "r" : "alpha") << "=" << sweep[k]
              << " fidelity=" << r.fidelity << "\n";
      std::vector<double> row{sweep[k], double(M), r.fidelity, r.p_success, double(r.s), r.best.drift};
      json betas = json::array(), phases = json::array();
      for (const auto& ring : r.best.betas) {
        row.push_back(ring.beta_abs);
        betas.push_back(ring.beta_abs);
        bmax = std::max(bmax, ring.beta_abs);
      }
      for (const auto& ring : r.best.betas) {
        row.push_back(ring.beta_phase);
        phases.push_back(ring.beta_phase);
      }
      t.add(std::move(row));
      fmin = std::min(fmin, r.fidelity);
      fmax = std::max(fmax, r.fidelity);
      results.push_back({{"M", M},
                         {"sweep_param", sweep[k]},
                         {"fidelity", r.fidelity},
                         {"p_success", r.p_success},
                         {"s", r.s},
                         {"drift", r.best.drift},
                         {"beta_abs", betas},
                         {"beta_phase", phases},
                         {"restart_trace", r.trace},
                         {"evaluations", r.evaluations}});
      if (std::find(points.begin(), points.end(), static_cast<int>(k)) != points.end()) {
        const int W = pr.truncation();
        const FilterOutcome got = emitExact({ringCoefficients(r.best)}, pr.beta0, {r.s}, W);
        w.table("wigner_achieved_M" + std::to_string(M) + "_" + std::to_string(k), wignerTable(got.state, grid));
      }
    }
    w.table("fidelity_M" + std::to_string(M), t);
    summary.push_back({{"M", M}, {"min_fidelity", fmin}, {"max_fidelity", fmax}, {"max_beta_abs", bmax}});
  }
  for (int k : points) {
    SynthesisProblem pr = base;
    pr.target = parseTarget(tf, kind, sweep[k]);
    w.table("wigner_target_" + std::to_string(k), wignerTable(targetFactory(pr.target, pr.truncation()), grid));
  }
  w.document("result", json{{"target", kind}, {"restarts", base.restarts}, {"max_iters", base.max_iters},
                            {"results", results}});
  return {{"files", w.files()}, {"curves", summary}};
}

json cmdWigner(Context& ctx) {
  Fields& f = ctx.cfg;
  Fields& sf = f.object("state");
  const std::string kind =
      sf.choice("kind", "vacuum", {"vacuum", "fock", "coherent", "squeezed", "cat", "triangular_cat", "custom"});
  const int n_max = f.integer("n_max", 40);
  const WignerSpec grid = parseWignerGrid(f);
  if (n_max < 0) throw ConfigError("n_max must be >= 0");
  PhotonicState st = PhotonicState::vacuum(n_max);
  if (kind == "fock") {
    const int n = sf.integer("n", 1);
    if (n < 0 || n > n_max) throw ConfigError("state.n must be in 0..n_max");
    st = PhotonicState::fock(n, n_max);
  } else if (kind == "coherent") {
    st = PhotonicState::coherent(sf.has("alpha") ? parseComplex(sf.raw("alpha"), "state.alpha") : cplx(1.0), n_max);
  } else if (kind != "vacuum") {
    st = targetFactory(parseTarget(sf, kind), n_max);
  }
  f.finish();
  Writer w = ctx.writer();
  w.table("wigner", wignerTable(st, grid));
  return {{"files", w.files()}, {"grid", wignerSummary(st, grid)}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum light from modulated free electrons", "freelight"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FREELIGHT_VERSION);

  struct Opts {
    std::string config, out_dir, format;
    std::uint64_t seed = 0;
    bool has_seed = false;
    bool full_budget = false;
  } o;
  using Handler = std::function<json(Context&)>;
  const std::vector<std::tuple<std::string, std::string, Handler>> commands{
      {"cf", "coherence factor scans", cmdCF},
      {"emit", "post- or pre-filtered emission scans", cmdEmit},
      {"stats", "photon statistics over CF planes", cmdStats},
      {"cat", "cat-state formation scans", cmdCat},
      {"optimize", "lateral IELS synthesis sweeps", cmdOptimize},
      {"wigner", "Wigner function of a photonic state", cmdWigner},
  };
  std::map<std::string, Handler> handlers;
  for (const auto& [name, help, h] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    if (name == "optimize") sub->add_flag("--full-budget", o.full_budget, "3000 restarts x 2000 iterations");
    handlers[name] = h;
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  const std::string command = app.get_subcommands().front()->get_name();
  o.has_seed = app.get_subcommands().front()->count("--seed") > 0;

  auto fail = [&](int code, const std::string& msg) {
    err << "error: " << msg << "\n";
    out << json{{"command", command}, {"status", "error"}, {"error", msg}}.dump(1) << "\n";
    return code;
  };

  json cfg = json::object();
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    try {
      cfg = json::parse(in);
    } catch (const json::parse_error& e) {
      return fail(2, std::string("config is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) return fail(2, "config must be a JSON object");
  }
  if (!o.out_dir.empty()) cfg["out"] = o.out_dir;
  if (!o.format.empty()) cfg["format"] = o.format;
  if (o.has_seed) cfg["seed"] = o.seed;

  try {
    Fields root(cfg, "config");
    const std::string out_dir = root.text("out", "out");
    const std::string format = root.choice("format", "csv", {"csv", "json"});
    const std::uint64_t seed = root.u64("seed", 0);
    Context ctx{root, cfg, command, out_dir, format, seed, o.full_budget, err};
    json summary = handlers.at(command)(ctx);
    summary["command"] = command;
    summary["status"] = "ok";
    summary["seed"] = seed;
    out << summary.dump(1) << "\n";
    return 0;
  } catch (const ConfigError& e) {
    return fail(2, e.what());
  } catch (const std::exception& e) {
    return fail(1, e.what());
  }
}

}  // namespace freelight::cli
