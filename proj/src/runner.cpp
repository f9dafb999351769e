#include "cmv/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "cmv/analysis.hpp"
#include "cmv/arith.hpp"
#include "cmv/models.hpp"
#include "cmv/transfer.hpp"

namespace cmv::run {
namespace {

using cfg::ExperimentConfig;
using cfg::json;

Cx get_complex(const json& p, const char* key) {
  const auto& v = p.at(key);
  return Cx(v[0].get<double>(), v[1].get<double>());
}

// Spectral parameter list: either the single explicit z or z_grid equally
// spaced points on the unit circle.
std::vector<Cx> z_list(const json& p) {
  if (p.contains("z")) return {get_complex(p, "z")};
  i64 g = p.at("z_grid").get<i64>();
  std::vector<Cx> zs(g);
  for (i64 k = 0; k < g; ++k) {
    double ph = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(g);
    zs[k] = Cx(std::cos(ph), std::sin(ph));
  }
  return zs;
}

// Unimodular phase in [0, 2 pi)
double phase_of(Cx z) {
  double p = std::atan2(z.imag(), z.real());
  if (p < 0.0) p += 2.0 * kPi;
  return p;
}

an::LyapunovOptions lyapunov_options(const json& p) {
  an::LyapunovOptions opt;
  opt.steps = p.at("steps").get<i64>();
  opt.restarts = static_cast<int>(p.at("restarts").get<i64>());
  opt.startIndex = p.at("start_index").get<i64>();
  opt.trace = p.value("trace", false);
  return opt;
}

// Memoizes the coefficient window all Lyapunov segments touch, so grid tasks
// evaluate the sequence once instead of once per grid point.
CoefficientSequence lyapunov_input(const CoefficientSequence& seq,
                                   const an::LyapunovOptions& opt) {
  i64 lastStep = opt.startIndex + static_cast<i64>(opt.restarts) * opt.steps;
  i64 lo = 2 * opt.startIndex - 1, hi = 2 * lastStep + 1;
  if (!seq.has_memo() && hi - lo + 1 <= (i64{1} << 26))
    return seq.materialized(lo, hi);
  return seq;
}

io::Table lyapunov_table(const ExperimentConfig& c, int threads,
                         json* extras) {
  an::LyapunovOptions opt = lyapunov_options(c.params);
  std::vector<Cx> zs = z_list(c.params);
  CoefficientSequence seq = lyapunov_input(c.sequence, opt);

  std::vector<an::LyapunovEstimate> est(zs.size());
  parallel_for(static_cast<i64>(zs.size()), threads,
               [&](i64 i) { est[i] = an::lyapunov(seq, zs[i], opt); });

  io::Table t;
  t.columns = {"z_re", "z_im", "L", "n", "stderr"};
  for (const auto& e : est)
    t.add_row({e.z.real(), e.z.imag(), e.value, e.steps, e.uncertainty});
  if (extras && opt.trace && !est.empty()) {
    json trace = json::array();
    for (const auto& [n, L] : est.front().trace) trace.push_back({n, L});
    (*extras)["trace_z0"] = std::move(trace);
  }
  return t;
}

io::Table criterion_table(const ExperimentConfig& c, int threads) {
  an::LyapunovOptions opt = lyapunov_options(c.params);
  double bound = c.params.at("B").get<double>();
  double bUnc = c.params.at("b_unc").get<double>();
  std::vector<Cx> zs = z_list(c.params);
  CoefficientSequence seq = lyapunov_input(c.sequence, opt);

  std::vector<an::CriterionVerdict> verdicts(zs.size());
  parallel_for(static_cast<i64>(zs.size()), threads, [&](i64 i) {
    an::LyapunovEstimate e = an::lyapunov(seq, zs[i], opt);
    verdicts[i] =
        an::delocalization_verdict(zs[i], e.value, e.uncertainty, bound, bUnc);
  });

  io::Table t;
  t.columns = {"z_re", "z_im", "L", "B", "verdict"};
  for (const auto& v : verdicts)
    t.add_row({v.z.real(), v.z.imag(), v.L, v.B, std::string(v.text())});
  return t;
}

io::Table reflectivity_table(const ExperimentConfig& c) {
  const json& p = c.params;
  std::vector<double> bGrid = p.at("b_grid").get<std::vector<double>>();
  auto certs = an::reflectivity_scan(
      c.sequence, bGrid, p.at("two_zeta_lo").get<i64>(),
      p.at("two_zeta_hi").get<i64>(), p.at("data_window").get<i64>());

  io::Table t;
  t.columns = {"B", "zeta", "window", "dev_alpha", "dev_rho", "pass"};
  for (const auto& cert : certs)
    t.add_row({cert.B, 0.5 * static_cast<double>(cert.twoZeta),
               cert.effectiveWindow, cert.maxAlphaDev, cert.maxRhoDev,
               i64{cert.pass ? 1 : 0}});
  return t;
}

io::Table delta_table(const ExperimentConfig& c) {
  const json& p = c.params;
  ar::GroupSpec g;
  ar::GroupPoint beta, omega;
  beta.torus = p.at("beta_torus").get<std::vector<double>>();
  omega.torus = p.at("omega_torus").get<std::vector<double>>();
  g.torusDim = static_cast<int>(beta.torus.size());
  if (p.contains("mods")) {
    g.cyclicMods = p.at("mods").get<std::vector<i64>>();
    beta.cyclic = p.at("beta_cyclic").get<std::vector<i64>>();
    omega.cyclic = p.at("omega_cyclic").get<std::vector<i64>>();
  }
  i64 nmax = p.at("nmax").get<i64>(), nmin = p.at("nmin").get<i64>();
  ar::DeltaResult r = ar::delta_estimate(g, beta, omega, nmax, nmin);

  io::Table t;
  t.columns = {"nmax", "nmin", "delta", "infinite", "witness", "witness_dist"};
  t.add_row({nmax, nmin, r.delta, i64{r.infinite ? 1 : 0}, r.witness,
             r.witnessDist});
  return t;
}

io::Table ipr_table(const ExperimentConfig& c, json* extras) {
  i64 a = c.params.at("a").get<i64>(), b = c.params.at("b").get<i64>();
  an::IprTable r = an::ipr_diagnostics(c.sequence, a, b);

  std::vector<size_t> order(r.eig.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    return phase_of(r.eig[x]) < phase_of(r.eig[y]);
  });

  io::Table t;
  t.columns = {"eig_re", "eig_im", "ipr"};
  for (size_t k : order)
    t.add_row({r.eig[k].real(), r.eig[k].imag(), r.ipr[k]});
  if (extras) {
    (*extras)["ipr_median"] = r.median;
    (*extras)["eig_max_residual"] = r.maxResidual;
  }
  return t;
}

io::Table spectrum_table(const ExperimentConfig& c, json* extras) {
  i64 a = c.params.at("a").get<i64>(), b = c.params.at("b").get<i64>();
  an::IprTable r = an::ipr_diagnostics(c.sequence, a, b);

  std::vector<size_t> order(r.eig.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    return phase_of(r.eig[x]) < phase_of(r.eig[y]);
  });

  io::Table t;
  t.columns = {"eig_re", "eig_im", "phase"};
  for (size_t k : order)
    t.add_row({r.eig[k].real(), r.eig[k].imag(), phase_of(r.eig[k])});
  if (extras) (*extras)["eig_max_residual"] = r.maxResidual;
  return t;
}

io::Table drift_table(const ExperimentConfig& c, json* extras) {
  const json& p = c.params;
  i64 m = p.at("m").get<i64>();
  Cx z = get_complex(p, "z");
  bool normalize = p.at("normalize").get<bool>();

  Rng rng(*c.seed);
  Cx uEven = rng.unit_circle() * (0.5 + 0.5 * rng.uniform());
  Cx uOdd = rng.unit_circle() * (0.5 + 0.5 * rng.uniform());
  tm::ReflectedDrift r =
      tm::reflected_drift(c.sequence, z, m, uEven, uOdd, normalize);

  io::Table t;
  t.columns = {"n", "drift"};
  for (size_t k = 0; k < r.increments.size(); ++k)
    t.add_row({static_cast<i64>(k) + 1, r.increments[k]});
  if (extras) {
    (*extras)["max_increment"] = r.maxIncrement;
    (*extras)["l1"] = r.l1;
  }
  return t;
}

io::Table identity_table(const ExperimentConfig& c, int threads,
                         json* extras) {
  i64 trials = c.params.at("trials").get<i64>();
  // The increment expansion is derived in the complexified rho gauge.
  CoefficientSequence seq =
      c.sequence.with_convention(RhoConvention::complexified);

  struct Row {
    i64 m = 0, n = 0;
    tm::IdentityReport rep;
  };
  std::vector<Row> rows(trials);
  u64 seed = *c.seed;
  parallel_for(trials, threads, [&](i64 i) {
    Rng rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<u64>(i + 1));
    Cx z = rng.unit_circle();
    i64 m = 2 + static_cast<i64>(rng.next() % 7);
    i64 n = 1 + static_cast<i64>(rng.next() % static_cast<u64>(2 * m - 1));
    Cx uEven = rng.unit_circle() * (0.5 + 0.5 * rng.uniform());
    Cx uOdd = rng.unit_circle() * (0.5 + 0.5 * rng.uniform());
    tm::SolutionSlice u = tm::propagate(seq, z, uEven, uOdd, 0, 0, 2 * m);
    rows[i] = {m, n, tm::wronskian_increment_identity(seq, z, u, m, n)};
  });

  io::Table t;
  t.columns = {"trial", "lhs", "rhs", "residual"};
  double worst = 0.0;
  for (i64 i = 0; i < trials; ++i) {
    const auto& r = rows[i];
    t.add_row({i, r.rep.lhs, r.rep.rhs, r.rep.diff});
    worst = std::max(worst, r.rep.diff);
  }
  if (extras) (*extras)["max_residual"] = worst;
  return t;
}

}  // namespace

void parallel_for(i64 n, int threads, const std::function<void(i64)>& fn) {
  if (n <= 0) return;
  i64 t = std::min<i64>(std::max(1, threads), n);
  if (t == 1) {
    for (i64 i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<i64> next{0};
  std::mutex errMu;
  std::exception_ptr err;
  auto work = [&]() {
    try {
      for (;;) {
        i64 i = next.fetch_add(1);
        if (i >= n) break;
        fn(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(errMu);
      if (!err) err = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(t));
  for (i64 k = 0; k < t; ++k) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

io::Table run_table(const ExperimentConfig& c, int threads, json* extras) {
  if (c.task == "lyapunov") return lyapunov_table(c, threads, extras);
  if (c.task == "criterion") return criterion_table(c, threads);
  if (c.task == "reflectivity") return reflectivity_table(c);
  if (c.task == "delta") return delta_table(c);
  if (c.task == "ipr") return ipr_table(c, extras);
  if (c.task == "spectrum") return spectrum_table(c, extras);
  if (c.task == "wronskian-drift") return drift_table(c, extras);
  if (c.task == "identity-check") return identity_table(c, threads, extras);
  throw cfg::ConfigError("unknown task \"" + c.task + "\"");
}

TaskOutcome run_task(const ExperimentConfig& c, const std::string& outDir,
                     int threads) {
  namespace fs = std::filesystem;
  auto t0 = std::chrono::steady_clock::now();

  json extras = json::object();
  io::Table table = run_table(c, threads, &extras);

  fs::path result(c.outputPath);
  if (!outDir.empty() && result.is_relative()) result = fs::path(outDir) / result;
  fs::path manifest = result;
  manifest += ".manifest.json";
  if (result.has_parent_path()) fs::create_directories(result.parent_path());

  std::string ref = manifest.filename().string();
  std::string body =
      c.format == "csv" ? io::to_csv(table, ref) : io::to_ndjson(table, ref);
  io::write_file(result.string(), body);

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0).count();
  json m;
  m["version"] = kVersion;
  m["task"] = c.task;
  m["config"] = c.raw;
  m["rows"] = table.rows.size();
  m["wall_time_s"] = wall;
  if (!extras.empty()) m["extras"] = extras;
  io::write_file(manifest.string(), m.dump(2) + "\n");

  TaskOutcome out;
  out.resultPath = result.string();
  out.manifestPath = manifest.string();
  out.rows = static_cast<i64>(table.rows.size());
  out.wallSeconds = wall;
  return out;
}

}  // namespace cmv::run
