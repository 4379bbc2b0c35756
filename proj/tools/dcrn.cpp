// dcrn: command-line front end.
//
//   dcrn analyze NET [--json] [--out FILE]
//   dcrn certify NET --history H [--tau LIST] [--json] [--out FILE]
//   dcrn equilibrium NET [--history H] [--tau LIST] [--json] [--out FILE]
//   dcrn simulate NET --history H [--tau LIST] [--t-end T] [--dt H]
//                 [--stride K] [--out traj.csv] [--plot-data DIR]
//   dcrn chain-compare NET --history H [--N LIST] [--t-end T] [--dt H]
//   dcrn reproduce-paper [OUTDIR]
//
// Exit codes: 0 ok, 1 usage, 2 parse, 3 capability, 4 precondition,
// 5 numeric, 6 configuration.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dcrn/dcrn.hpp"

#ifndef DCRN_VERSION
#define DCRN_VERSION "0.0.0"
#endif
#ifndef DCRN_DATA_DIR
#define DCRN_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dcrn;

namespace {

struct Globals {
  bool json = false;
  std::string out;
  std::string manifest;
  int jobs = 0;
  bool deterministic = true;
  bool wall_clock = false;
  std::string data_dir = DCRN_DATA_DIR;
};

// Records every file written so the manifest can list them; the manifest
// itself is written last.
class OutputSet {
 public:
  void write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path.string() + "'");
    f << content;
    if (!f) throw ConfigError("write failed for '" + path.string() + "'");
    files_.push_back({path, content.size()});
  }

  bool empty() const { return files_.empty(); }

  void write_manifest(const fs::path& path, const std::string& command,
                      const std::vector<std::string>& inputs, const json& config,
                      const Globals& g, double seconds) {
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    json outs = json::array();
    for (const auto& [p, bytes] : files_)
      outs.push_back({{"path", fs::relative(p, base).generic_string()}, {"bytes", bytes}});
    json m = {{"command", command},
              {"inputs", inputs},
              {"config", config},
              {"tool_version", DCRN_VERSION},
              {"deterministic", g.deterministic && !g.wall_clock},
              {"outputs", outs}};
    if (g.wall_clock) m["wall_clock_seconds"] = seconds;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write manifest '" + path.string() + "'");
    f << m.dump(2) << "\n";
  }

 private:
  std::vector<std::pair<fs::path, std::size_t>> files_;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string join_point(const Point& x, const char* sep = ", ") {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? sep : "") + fmt6(x[i]);
  return s;
}

template <class F>
auto with_context(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(what + ": " + e.what());
  } catch (const CapabilityError& e) {
    throw CapabilityError(what + ": " + e.what());
  } catch (const PreconditionError& e) {
    throw PreconditionError(what + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(what + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

// Runs f(0..n-1) on up to `jobs` threads; results are stored by index so
// output order never depends on scheduling. The lowest-index failure wins.
template <class F>
void parallel_for(std::size_t n, int jobs, F f) {
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try { f(i); } catch (...) { errors[i] = std::current_exception(); }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < n;) {
          try { f(i); } catch (...) { errors[i] = std::current_exception(); }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

ReactionNetwork load_with_delays(const std::string& path,
                                 const std::vector<double>& tau) {
  auto net = load_network(path);
  if (!tau.empty()) net = net.with_delays(tau);
  return net;
}

// A history argument is a path to a JSON file or an inline JSON object.
HistoryFunction history_arg(const std::string& arg, const ReactionNetwork& net) {
  if (!arg.empty() && arg.front() == '{') {
    json j;
    try {
      j = json::parse(arg);
    } catch (const json::exception& e) {
      throw ParseError(std::string("history JSON: ") + e.what());
    }
    return history_from_json(j, net.species_count(), net.tau_max());
  }
  return load_history(arg, net.species_count(), net.tau_max());
}

void emit(OutputSet& outputs, const Globals& g, const std::string& content) {
  if (g.out.empty() || g.out == "-")
    std::cout << content;
  else
    outputs.write(g.out, content);
}

void finish(OutputSet& outputs, const Globals& g, const std::string& command,
            const std::vector<std::string>& inputs, const json& config,
            std::chrono::steady_clock::time_point start) {
  if (outputs.empty()) return;
  const fs::path path = !g.manifest.empty() ? fs::path(g.manifest)
                                            : fs::path(g.out + ".manifest.json");
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  outputs.write_manifest(path, command, inputs, config, g, secs);
}

// ---------------------------------------------------------------------------

std::string structure_text(const ReactionNetwork& net, const StructureReport& rep) {
  std::ostringstream s;
  s << "species: ";
  for (std::size_t i = 0; i < net.species_count(); ++i) s << (i ? " " : "") << net.species(i).name;
  s << "\nreactions: " << rep.reactions << "  complexes: " << rep.complexes
    << "  linkage classes: " << rep.linkage_classes.size() << "\n";
  s << "weakly reversible: " << (rep.weakly_reversible ? "yes" : "no")
    << "  reversible: " << (rep.reversible ? "yes" : "no") << "\n";
  s << "dim S: " << rep.dim_S << "  deficiency: " << rep.deficiency << "\n";
  s << "semilocking sets: " << rep.semilocking.size() << "\n";
  for (std::size_t i = 0; i < rep.semilocking.size(); ++i)
    s << "  " << format_set(net, rep.semilocking.semilocking[i])
      << (rep.semilocking.locking[i] ? "  locking" : "") << "\n";
  return s.str();
}

std::string certificate_text(const ReactionNetwork& net, const PersistenceCertificate& c,
                             const std::optional<StabilityStatement>& st) {
  std::ostringstream s;
  s << "verdict: " << to_string(c.verdict) << "\n";
  s << "routes:";
  if (c.routes.empty()) s << " none";
  for (auto r : c.routes) s << " " << to_string(r);
  s << "\ndim S: " << c.dim_S << "  deficiency: " << c.deficiency
    << "  complex balanced: " << (c.complex_balanced ? "yes" : "no") << "\n";
  for (const auto& e : c.per_w)
    s << "  W=" << format_set(net, e.w) << "  " << to_string(e.face.tag)
      << "  zw_dim=" << e.face.zw_dim << (e.locking ? "  locking" : "") << "\n";
  for (const auto& n : c.notes) s << "note: " << n << "\n";
  if (st) s << "equilibrium in class: (" << join_point(st->equilibrium) << ")\n"
            << "stability: " << st->claim << "\n";
  return s.str();
}

json certificate_json(const ReactionNetwork& net, const PersistenceCertificate& c,
                      const std::optional<StabilityStatement>& st) {
  json j = to_json(net, c);
  if (st) j["stability"] = to_json(*st);
  return j;
}

std::optional<StabilityStatement> maybe_stability(const ReactionNetwork& net,
                                                  const HistoryFunction& psi,
                                                  const PersistenceCertificate& c) {
  if (c.verdict != Verdict::Persistent) return std::nullopt;
  return stability_statement(net, psi, c);
}

// Method-of-steps run with monitors; V is attached when a complex-balanced
// equilibrium exists.
struct SimulationRun {
  Trajectory traj;
  std::optional<Point> xbar;
};

SimulationRun simulate_run(const ReactionNetwork& net, const HistoryFunction& psi,
                           const SolverConfig& cfg) {
  cfg.validate(net);
  std::optional<Point> xbar;
  try {
    xbar = equilibrium_in_class(net, psi).point;
  } catch (const PreconditionError&) {
  }
  auto traj = integrate_dde(net, psi, cfg);
  attach_monitors(traj, net, xbar, conserved_basis(net));
  return {std::move(traj), xbar};
}

std::string csv_of(const Trajectory& traj) {
  std::ostringstream s;
  write_trajectory_csv(s, traj);
  return s.str();
}

std::string plot_series(const Trajectory& traj, const std::string& name, std::size_t j) {
  std::string s = "# t " + name + "\n";
  for (const auto& m : traj.monitors()) s += fmt17(m.t) + " " + fmt17(m.x[j]) + "\n";
  return s;
}

// ---------------------------------------------------------------------------

int cmd_analyze(const Globals& g, const std::string& net_path) {
  const auto start = std::chrono::steady_clock::now();
  const auto net = load_network(net_path);
  const auto rep = analyze_structure(net);
  OutputSet outputs;
  emit(outputs, g, g.json ? to_json(net, rep).dump(2) + "\n" : structure_text(net, rep));
  finish(outputs, g, "analyze", {net_path}, json::object(), start);
  return 0;
}

int cmd_certify(const Globals& g, const std::string& net_path, const std::string& hist,
                const std::vector<double>& tau) {
  const auto start = std::chrono::steady_clock::now();
  const auto net = load_with_delays(net_path, tau);
  const auto psi = history_arg(hist, net);
  const auto cert = certify(net, psi);
  const auto st = maybe_stability(net, psi, cert);
  OutputSet outputs;
  emit(outputs, g, g.json ? certificate_json(net, cert, st).dump(2) + "\n"
                          : certificate_text(net, cert, st));
  finish(outputs, g, "certify", {net_path, hist}, {{"tau", tau}}, start);
  if (!cert.complex_balanced) {
    std::cerr << "dcrn: complex-balanced equilibrium not established";
    for (const auto& n : cert.notes) std::cerr << "\n  " << n;
    std::cerr << "\n";
    return 4;
  }
  return 0;
}

int cmd_equilibrium(const Globals& g, const std::string& net_path, const std::string& hist,
                    const std::vector<double>& tau) {
  const auto start = std::chrono::steady_clock::now();
  const auto net = load_with_delays(net_path, tau);
  const auto global = solve_complex_balanced(net);
  std::optional<EquilibriumResult> local;
  if (!hist.empty()) local = equilibrium_in_class(net, history_arg(hist, net), global);
  std::string body;
  if (g.json) {
    json j = {{"species", net.species_names()}, {"complex_balanced", to_json(global)}};
    if (local) j["in_class"] = to_json(*local);
    body = j.dump(2) + "\n";
  } else {
    body = "complex-balanced equilibrium: (" + join_point(global.point) +
           ")  cb_residual=" + fmt6(global.cb_residual) + "\n";
    if (local)
      body += "equilibrium in class: (" + join_point(local->point) +
              ")  cb_residual=" + fmt6(local->cb_residual) +
              "  newton_iterations=" + std::to_string(local->newton_iterations) + "\n";
  }
  OutputSet outputs;
  emit(outputs, g, body);
  finish(outputs, g, "equilibrium", {net_path, hist}, {{"tau", tau}}, start);
  return 0;
}

int cmd_simulate(const Globals& g, const std::string& net_path, const std::string& hist,
                 const std::vector<double>& tau, const SolverConfig& cfg,
                 const std::string& plot_dir) {
  const auto start = std::chrono::steady_clock::now();
  const auto net = load_with_delays(net_path, tau);
  const auto psi = history_arg(hist, net);
  const auto run = simulate_run(net, psi, cfg);
  OutputSet outputs;
  emit(outputs, g, csv_of(run.traj));
  if (!plot_dir.empty())
    for (std::size_t j = 0; j < net.species_count(); ++j)
      outputs.write(fs::path(plot_dir) / (net.species(j).name + ".dat"),
                    plot_series(run.traj, net.species(j).name, j));
  if (run.traj.clamp_events() > 0)
    std::cerr << "dcrn: " << run.traj.clamp_events()
              << " round-off undershoots clamped to zero\n";
  Globals gm = g;
  if (gm.out.empty() && !plot_dir.empty()) gm.out = (fs::path(plot_dir) / "plot").string();
  finish(outputs, gm, "simulate", {net_path, hist},
         {{"tau", tau}, {"t_end", cfg.t_end}, {"dt", cfg.step}, {"stride", cfg.monitor_stride}},
         start);
  return 0;
}

struct ChainRow {
  std::size_t n;
  double gap;
};

std::vector<ChainRow> chain_table(const ReactionNetwork& net, const HistoryFunction& psi,
                                  const std::vector<std::size_t>& ns,
                                  const SolverConfig& cfg, int jobs) {
  const auto ref = integrate_dde(net, psi, cfg);
  std::vector<ChainRow> rows(ns.size());
  parallel_for(ns.size(), jobs, [&](std::size_t i) {
    rows[i] = {ns[i], sup_gap(chain_approximation(net, psi, ns[i], cfg), ref)};
  });
  return rows;
}

std::string chain_csv(const std::vector<ChainRow>& rows) {
  std::string s = "N,gap\n";
  for (const auto& r : rows) s += std::to_string(r.n) + "," + fmt17(r.gap) + "\n";
  return s;
}

// Non-increasing in N up to 10% relative noise.
bool chain_monotone(std::vector<ChainRow> rows) {
  std::sort(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.n < b.n; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].gap > 1.1 * rows[i - 1].gap) return false;
  return true;
}

int cmd_chain_compare(const Globals& g, const std::string& net_path, const std::string& hist,
                      const std::vector<double>& tau, const std::vector<std::size_t>& ns,
                      const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const auto net = load_with_delays(net_path, tau);
  const auto psi = history_arg(hist, net);
  const auto rows = chain_table(net, psi, ns, cfg, g.jobs);
  std::string body;
  if (g.json) {
    json t = json::array();
    for (const auto& r : rows) t.push_back({{"N", r.n}, {"gap", r.gap}});
    body = json{{"t_end", cfg.t_end}, {"dt", cfg.step}, {"table", t},
                {"monotone", chain_monotone(rows)}}.dump(2) + "\n";
  } else {
    body = chain_csv(rows);
  }
  OutputSet outputs;
  emit(outputs, g, body);
  if (!chain_monotone(rows))
    std::cerr << "dcrn: warning: gaps are not non-increasing in N\n";
  finish(outputs, g, "chain-compare", {net_path, hist},
         {{"tau", tau}, {"N", ns}, {"t_end", cfg.t_end}, {"dt", cfg.step}}, start);
  return 0;
}

// ---------------------------------------------------------------------------
// reproduce-paper

struct FigureSetting {
  std::string name;
  std::string network;
  std::vector<double> tau;
  json history;
  double t_end = 60.0;
  double dt = 0.005;
  std::string caption;
};

std::vector<FigureSetting> load_figures(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw ConfigError("figure directory '" + dir.string() + "' not found");
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<FigureSetting> out;
  for (const auto& p : files) {
    std::ifstream in(p);
    json j;
    try {
      in >> j;
      out.push_back({j.at("name"), j.at("network"), j.at("tau").get<std::vector<double>>(),
                     j.at("history"), j.value("t_end", 60.0), j.value("dt", 0.005),
                     j.value("caption", "")});
    } catch (const json::exception& e) {
      throw ParseError(p.string() + ": " + e.what());
    }
  }
  return out;
}

struct FigureResult {
  std::string csv;
  std::vector<std::pair<std::string, std::string>> plots;
  json stats;
};

FigureResult run_figure(const FigureSetting& f, const fs::path& data_dir) {
  const auto net = load_network((data_dir / f.network).string()).with_delays(f.tau);
  const auto psi = history_from_json(f.history, net.species_count(), net.tau_max());
  SolverConfig cfg;
  cfg.t_end = f.t_end;
  cfg.step = f.dt;
  const auto run = simulate_run(net, psi, cfg);
  const auto& tr = run.traj;
  if (!run.xbar) throw PreconditionError("no complex-balanced equilibrium");
  FigureResult res;
  res.csv = csv_of(tr);
  for (std::size_t j = 0; j < net.species_count(); ++j)
    res.plots.push_back({net.species(j).name + ".dat", plot_series(tr, net.species(j).name, j)});

  const Point& last = tr.state(tr.knots() - 1);
  double gap = 0.0;
  for (std::size_t j = 0; j < last.size(); ++j) gap = std::max(gap, std::abs(last[j] - (*run.xbar)[j]));
  const auto descent = check_descent(tr);
  const auto drift = conservation_drift(tr);
  const auto mins = min_profile(tr, 10.0);
  res.stats = {{"name", f.name},
               {"caption", f.caption},
               {"equilibrium", *run.xbar},
               {"final_state", last},
               {"final_gap", gap},
               {"final_gap_within_1e-3", gap <= 1e-3},
               {"conservation_drift", drift},
               {"lyapunov_v0", descent.v0},
               {"lyapunov_max_increase", descent.max_jump},
               {"lyapunov_descent", descent.pass},
               {"minima_after_t10", mins},
               {"clamp_events", tr.clamp_events()}};
  return res;
}

struct ExampleSpec {
  std::string name;
  std::string file;
  Point history;
  std::optional<Point> stated_equilibrium;
  std::string stated_claim;
};

int cmd_reproduce(const Globals& g, const std::string& outdir) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path data = g.data_dir;
  const fs::path out = outdir;
  OutputSet outputs;
  json summary = {{"examples", json::array()}, {"figures", json::array()}};
  std::string text = "dcrn reproduction summary\n\n";

  const std::vector<ExampleSpec> examples = {
      {"example1", "example1.crn", {1.0, 2.0}, Point{1.49, 0.95},
       "unique positive equilibrium (1.49, 0.95)"},
      {"example2", "example2.crn", {2.0, 3.0, 1.0}, std::nullopt,
       "complex-balanced equilibria satisfy x1 = x2 = x3"}};

  for (const auto& ex : examples) {
    with_context(ex.name, [&] {
      const auto net = load_network((data / ex.file).string());
      const auto psi = HistoryFunction::constant(ex.history, net.tau_max());
      const auto rep = analyze_structure(net);
      const auto cert = certify(net, psi);
      const auto st = maybe_stability(net, psi, cert);
      if (cert.verdict != Verdict::Persistent)
        throw PreconditionError("certificate is not Persistent");
      outputs.write(out / ex.name / "structure.json", to_json(net, rep).dump(2) + "\n");
      outputs.write(out / ex.name / "certificate.json",
                    certificate_json(net, cert, st).dump(2) + "\n");
      const auto& global = *cert.equilibrium;
      json eq = {{"species", net.species_names()},
                 {"history", history_to_json(psi)},
                 {"complex_balanced", to_json(global)},
                 {"in_class", to_json(st->detail)}};
      outputs.write(out / ex.name / "equilibrium.json", eq.dump(2) + "\n");

      json e = {{"name", ex.name},
                {"verdict", to_string(cert.verdict)},
                {"routes", certificate_json(net, cert, st)["routes"]},
                {"computed_equilibrium", global.point},
                {"computed_cb_residual", global.cb_residual},
                {"stated_claim", ex.stated_claim}};
      text += ex.name + ": verdict " + to_string(cert.verdict) + "\n";
      text += "  computed complex-balanced equilibrium (" + join_point(global.point) + ")\n";
      text += "  in-class equilibrium for psi = (" + join_point(ex.history) + "): (" +
              join_point(st->equilibrium) + ")\n";
      if (ex.stated_equilibrium) {
        const double res = complex_balance_residual(net, *ex.stated_equilibrium);
        double diff = 0.0;
        for (std::size_t j = 0; j < global.point.size(); ++j)
          diff = std::max(diff, std::abs(global.point[j] - (*ex.stated_equilibrium)[j]));
        const bool discrepancy = diff > 0.01;
        e["stated_equilibrium"] = *ex.stated_equilibrium;
        e["stated_equilibrium_cb_residual"] = res;
        e["max_abs_difference"] = diff;
        e["discrepancy"] = discrepancy;
        text += "  stated value (" + join_point(*ex.stated_equilibrium) +
                ") has complex-balance residual " + fmt6(res) + "\n";
        if (discrepancy)
          text += "  DISCREPANCY: stated equilibrium differs from the computed one by " +
                  fmt6(diff) + " and is not complex balanced\n";
      } else {
        double spread = 0.0;
        for (double v : global.point) spread = std::max(spread, std::abs(v - global.point[0]));
        e["max_coordinate_spread"] = spread;
        e["claim_holds"] = spread <= 1e-10;
        text += "  stated property x1 = x2 = x3: " +
                std::string(spread <= 1e-10 ? "holds" : "FAILS") + " (spread " + fmt6(spread) + ")\n";
      }
      summary["examples"].push_back(e);
      return 0;
    });
  }

  const auto figures = load_figures(data / "figures");
  std::vector<FigureResult> results(figures.size());
  parallel_for(figures.size(), g.jobs, [&](std::size_t i) {
    results[i] = with_context(figures[i].name, [&] { return run_figure(figures[i], data); });
  });
  text += "\nfigure settings (T, h from config)\n";
  for (std::size_t i = 0; i < figures.size(); ++i) {
    const auto& f = figures[i];
    const auto& r = results[i];
    outputs.write(out / "trajectories" / (f.name + ".csv"), r.csv);
    for (const auto& [file, body] : r.plots) outputs.write(out / "plot" / f.name / file, body);
    summary["figures"].push_back(r.stats);
    text += "  " + f.name + " " + f.caption + "\n    final gap " +
            fmt6(r.stats["final_gap"].get<double>()) +
            (r.stats["final_gap_within_1e-3"].get<bool>() ? "" : "  (exceeds 1e-3)") +
            "  V descent " + (r.stats["lyapunov_descent"].get<bool>() ? "ok" : "VIOLATED") + "\n";
  }

  with_context("chain comparison", [&] {
    const auto net = load_network((data / "example1.crn").string()).with_delays({1, 2, 1});
    const auto psi = HistoryFunction::constant({1, 2}, net.tau_max());
    SolverConfig cfg;
    cfg.t_end = 20.0;
    const auto rows = chain_table(net, psi, {10, 20, 40, 80}, cfg, g.jobs);
    outputs.write(out / "chain" / "example1.csv", chain_csv(rows));
    json t = json::array();
    text += "\nchain method, example1 tau=(1,2,1), psi=(1,2), T=20\n";
    for (const auto& r : rows) {
      t.push_back({{"N", r.n}, {"gap", r.gap}});
      text += "  N=" + std::to_string(r.n) + "  gap " + fmt6(r.gap) + "\n";
    }
    summary["chain"] = {{"table", t}, {"monotone", chain_monotone(rows)}};
    return 0;
  });

  outputs.write(out / "summary.json", summary.dump(2) + "\n");
  outputs.write(out / "summary.txt", text);
  Globals gm = g;
  if (gm.manifest.empty()) gm.manifest = (out / "manifest.json").string();
  finish(outputs, gm, "reproduce-paper", {data.string()}, json::object(), start);
  if (!g.json) std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persistence certification and simulation for delayed mass-action networks"};
  app.set_version_flag("--version", DCRN_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_flag("--json", g.json, "Emit JSON instead of text");
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--manifest", g.manifest, "Manifest path (default <out>.manifest.json)");
  app.add_option("--jobs", g.jobs, "Concurrent sub-jobs; 1 forces serial, 0 = hardware")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--seedless-deterministic,!--no-seedless-deterministic", g.deterministic,
               "Deterministic outputs (default)");
  app.add_flag("--wall-clock", g.wall_clock, "Record wall-clock time in the manifest");
  app.add_option("--data-dir", g.data_dir, "Directory with example networks and figure configs");

  std::string net_path, hist, plot_dir, outdir = "paper_output";
  std::vector<double> tau;
  std::vector<std::size_t> ns{10, 20, 40, 80};
  SolverConfig cfg;

  auto* analyze = app.add_subcommand("analyze", "Structural analysis of a network");
  analyze->add_option("network", net_path, ".crn file")->required();

  auto add_common = [&](CLI::App* sub, bool need_history) {
    sub->add_option("network", net_path, ".crn file")->required();
    auto* h = sub->add_option("--history", hist, "History JSON file or inline object");
    if (need_history) h->required();
    sub->add_option("--tau", tau, "Delays overriding the file, comma separated")
        ->delimiter(',');
  };
  auto add_solver = [&](CLI::App* sub, double t_end) {
    cfg.t_end = t_end;
    sub->add_option("--t-end", cfg.t_end, "Final time");
    sub->add_option("--dt", cfg.step, "Step size");
  };

  auto* cert = app.add_subcommand("certify", "Persistence certificate");
  add_common(cert, true);
  auto* equi = app.add_subcommand("equilibrium", "Complex-balanced and in-class equilibria");
  add_common(equi, false);
  auto* sim = app.add_subcommand("simulate", "Method-of-steps integration");
  add_common(sim, true);
  add_solver(sim, 60.0);
  double chain_t_end = 20.0;
  sim->add_option("--stride", cfg.monitor_stride, "Steps between monitor samples");
  sim->add_option("--plot-data", plot_dir, "Directory for per-species plot data");
  auto* chain = app.add_subcommand("chain-compare", "Chain approximation against method of steps");
  add_common(chain, true);
  chain->add_option("--N", ns, "Chain lengths, comma separated")->delimiter(',');
  chain->add_option("--t-end", chain_t_end, "Final time");
  chain->add_option("--dt", cfg.step, "Step size");
  auto* repro = app.add_subcommand("reproduce-paper", "Regenerate the worked examples and figure data");
  repro->add_option("outdir", outdir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*analyze) return cmd_analyze(g, net_path);
    if (*cert) return cmd_certify(g, net_path, hist, tau);
    if (*equi) return cmd_equilibrium(g, net_path, hist, tau);
    if (*sim) return cmd_simulate(g, net_path, hist, tau, cfg, plot_dir);
    if (*chain) {
      cfg.t_end = chain_t_end;
      return cmd_chain_compare(g, net_path, hist, tau, ns, cfg);
    }
    if (*repro) return cmd_reproduce(g, outdir);
  } catch (const ParseError& e) {
    std::cerr << "dcrn: parse error: " << e.what() << "\n";
    return 2;
  } catch (const CapabilityError& e) {
    std::cerr << "dcrn: unsupported: " << e.what() << "\n";
    return 3;
  } catch (const PreconditionError& e) {
    std::cerr << "dcrn: precondition failed: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "dcrn: numerical failure: " << e.what() << "\n";
    return 5;
  } catch (const ConfigError& e) {
    std::cerr << "dcrn: configuration error: " << e.what() << "\n";
    return 6;
  } catch (const std::exception& e) {
    std::cerr << "dcrn: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
