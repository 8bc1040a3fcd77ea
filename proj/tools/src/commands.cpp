#include "sphereflow/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "sphereflow/cli/output.hpp"
#include "sphereflow/cli/snapshot.hpp"
#include "sphereflow/random_fields.hpp"
#include "sphereflow/verify.hpp"

namespace sphereflow::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Json record_json(const DiagnosticsRecord& r) {
  return Json{{"t", r.t},
              {"l2_norm", r.l2_norm},
              {"energy", r.energy},
              {"lambda", r.lambda},
              {"stat_residual", r.stat_residual},
              {"energy_eq_residual", r.energy_eq_residual}};
}

void write_manifest(RunManifest& manifest, const fs::path& dir, Clock::time_point start) {
  manifest.wall_seconds = seconds_since(start);
  write_text(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
}

}  // namespace

fs::path output_dir(const GlobalOptions& options) { return options.out.value_or("out"); }

RunConfig load_config(const GlobalOptions& options) {
  if (!options.config) throw ValidationError("--config is required for this command");
  RunConfig cfg = parse_config(*options.config);
  if (options.seed) cfg.flow.seed = *options.seed;
  return cfg;
}

std::optional<Spectrum> try_spectrum(const Domain& domain) {
  try {
    return compute_spectrum(domain);
  } catch (const CapacityError&) {
    return std::nullopt;
  }
}

Field make_initial(const RunConfig& config, const Domain& domain, const Spectrum* spectrum) {
  const InitialSpec& init = config.initial;
  Field u;
  switch (init.kind) {
    case InitialKind::modes: {
      if (spectrum == nullptr) throw CapacityError("mode initial data needs the eigenbasis; grid exceeds the cap");
      u = Field(domain);
      for (const auto& m : init.modes) u.axpy(m.coefficient, spectrum->mode(m.index));
      break;
    }
    case InitialKind::random: {
      if (spectrum == nullptr) throw CapacityError("random initial data needs the eigenbasis; grid exceeds the cap");
      RandomFieldGenerator gen(*spectrum, config.flow.seed);
      u = gen.draw(init.population, 1.0);
      break;
    }
    case InitialKind::snapshot: {
      SnapshotFile snap = read_snapshot(init.snapshot);
      if (!(snap.domain == domain)) {
        throw ValidationError("snapshot " + init.snapshot.string() + " was written on a different grid");
      }
      u = std::move(snap.field);
      break;
    }
  }
  const double norm = l2_norm(domain, u);
  if (!(norm > 0.0)) throw ValidationError("initial field is zero");
  u *= init.norm / norm;
  return u;
}

RunResult execute_run(const RunConfig& config, const fs::path& out_dir) {
  const auto start = Clock::now();
  prepare_output_dir(out_dir);
  RunManifest manifest = make_manifest(config, "run");
  const Domain domain = config.domain.build();
  const auto spectrum = try_spectrum(domain);
  const Spectrum* sp = spectrum ? &*spectrum : nullptr;
  const Field u0 = make_initial(config, domain, sp);
  RunResult result = run_flow(domain, u0, config.flow, sp);

  {
    std::ofstream csv(out_dir / "timeseries.csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("cannot write " + (out_dir / "timeseries.csv").string());
    write_timeseries_csv(csv, result.series);
  }
  manifest.outputs.push_back("timeseries.csv");
  if (config.output.snapshots) {
    const fs::path snap_dir = out_dir / "snapshots";
    prepare_output_dir(snap_dir);
    for (const auto& s : result.snapshots) {
      char name[48];
      std::snprintf(name, sizeof name, "step_%09zu.sphf", s.step);
      write_snapshot(domain, s.field, s.t, config.flow.p, snap_dir / name);
      manifest.outputs.push_back(fs::path("snapshots") / name);
    }
  }
  if (config.output.plotdata) {
    const fs::path plot_dir = out_dir / "plot";
    prepare_output_dir(plot_dir);
    for (const auto& p : write_plotdata(plot_dir, result.series)) {
      manifest.outputs.push_back(fs::path("plot") / p.filename());
    }
  }
  manifest.result = Json{{"termination", std::string(to_string(result.termination))},
                         {"failure_message", result.failure_message},
                         {"steps_taken", result.steps_taken},
                         {"initial_energy", result.initial_energy},
                         {"max_energy_increase", result.max_energy_increase},
                         {"spectrum_available", sp != nullptr},
                         {"final", result.series.empty() ? Json(nullptr) : record_json(result.series.back())}};
  manifest.outputs.push_back("manifest.json");
  write_manifest(manifest, out_dir, start);
  return result;
}

int cmd_run(const GlobalOptions& options, std::ostream& log) {
  const RunConfig cfg = load_config(options);
  const RunResult result = execute_run(cfg, output_dir(options));
  const auto& last = result.series.back();
  log << "termination " << to_string(result.termination) << " after " << result.steps_taken
      << " steps, t = " << format_double(last.t) << '\n'
      << "energy " << format_double(last.energy) << ", lambda " << format_double(last.lambda)
      << ", residual " << format_double(last.stat_residual) << ", l2_norm "
      << format_double(last.l2_norm) << '\n';
  if (result.termination == Termination::solver_failure) {
    log << "error: solver failure: " << result.failure_message << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_stationary(const GlobalOptions& options, std::optional<double> tol, std::ostream& log) {
  const auto start = Clock::now();
  RunConfig cfg = load_config(options);
  if (tol) {
    if (!(*tol > 0.0)) throw ValidationError("--tol must be positive");
    cfg.stationary_tol = *tol;
  }
  if (cfg.flow.cutoff || cfg.flow.yosida_mu) {
    throw ValidationError("stationary solves use the plain flow; remove [cutoff] and [yosida]");
  }
  const fs::path out = output_dir(options);
  prepare_output_dir(out);
  RunManifest manifest = make_manifest(cfg, "stationary");
  const Domain domain = cfg.domain.build();
  const auto spectrum = try_spectrum(domain);
  const Spectrum* sp = spectrum ? &*spectrum : nullptr;
  const Field u0 = make_initial(cfg, domain, sp);
  const StationaryResult res = solve_ground_state(domain, u0, cfg.flow, cfg.stationary_tol, sp);

  write_snapshot(domain, res.field, static_cast<double>(res.iterations) * cfg.flow.dt, cfg.flow.p,
                 out / "stationary.sphf");
  const Json report{{"p", cfg.flow.p},
                    {"multiplier", res.multiplier},
                    {"energy", res.energy},
                    {"residual", res.residual},
                    {"tolerance", cfg.stationary_tol},
                    {"iterations", res.iterations},
                    {"converged", res.converged},
                    {"termination", std::string(to_string(res.termination))},
                    {"lambda1_discrete", domain.lambda1_discrete()},
                    {"lambda1_continuum", domain.lambda1()}};
  write_text(out / "stationary.json", report.dump(2) + "\n");
  manifest.outputs = {"stationary.json", "stationary.sphf", "manifest.json"};
  manifest.result = report;
  write_manifest(manifest, out, start);

  log << "lambda(v) = " << format_double(res.multiplier) << '\n'
      << "E(v)      = " << format_double(res.energy) << '\n'
      << "residual  = " << format_double(res.residual) << '\n'
      << "steps     = " << res.iterations << (res.converged ? " (converged)" : " (not converged)") << '\n'
      << "lambda1h  = " << format_double(domain.lambda1_discrete()) << '\n';
  return res.converged ? kExitOk : kExitFailure;
}

int cmd_verify(const std::string& suite, const GlobalOptions& options, std::ostream& log) {
  if (!is_verify_suite(suite)) {
    std::string names;
    for (auto n : verify_suite_names()) names += (names.empty() ? "" : ", ") + std::string(n);
    throw ValidationError("unknown verify suite '" + suite + "' (expected one of: " + names + ")");
  }
  const std::uint64_t seed = options.seed.value_or(0);
  const fs::path out = output_dir(options);
  prepare_output_dir(out);
  const auto reports = run_verify_suite(suite, seed);
  bool ok = true;
  Json list = Json::array();
  for (const auto& r : reports) {
    if (!r.pass && !r.informational) ok = false;
    list.push_back(report_json(r));
    log << (r.pass ? "PASS" : "FAIL") << (r.informational ? " (informational) " : " ") << r.name
        << "  worst_margin=" << format_double(r.worst_margin) << "  trials=" << r.trials << '\n';
  }
  const Json doc{{"suite", suite}, {"seed", seed}, {"pass", ok}, {"reports", std::move(list)}};
  write_text(out / ("verify_" + suite + ".json"), doc.dump(2) + "\n");
  return ok ? kExitOk : kExitFailure;
}

int cmd_sweep(const GlobalOptions& options, const SweepOptions& sweep, std::ostream& log) {
  const RunConfig base = load_config(options);
  if (options.jobs == 0) throw ValidationError("--jobs must be at least 1");
  if (!sweep.mus.empty() && base.flow.cutoff) {
    throw ValidationError("a mu sweep cannot be combined with [cutoff]");
  }
  const std::vector<double> dts = sweep.dts.empty() ? std::vector<double>{base.flow.dt} : sweep.dts;
  const std::vector<double> ps = sweep.ps.empty() ? std::vector<double>{base.flow.p} : sweep.ps;
  std::vector<std::optional<double>> mus;
  if (sweep.mus.empty()) {
    mus.push_back(base.flow.yosida_mu);
  } else {
    for (double mu : sweep.mus) mus.emplace_back(mu);
  }

  struct Job {
    RunConfig config;
    std::string name;
    std::optional<RunResult> result;
    std::string error;
  };
  std::vector<Job> jobs;
  for (double p : ps) {
    for (const auto& mu : mus) {
      for (double dt : dts) {
        Job j{base, {}, std::nullopt, {}};
        j.config.flow.dt = dt;
        j.config.flow.p = p;
        if (j.config.flow.cutoff) j.config.flow.cutoff->p = p;
        j.config.flow.yosida_mu = mu;
        j.name = "p" + short_number(p) + (mu ? "_mu" + short_number(*mu) : "") + "_dt" + short_number(dt);
        validate(j.config);
        jobs.push_back(std::move(j));
      }
    }
  }
  const fs::path out = output_dir(options);
  prepare_output_dir(out);

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      Job& j = jobs[i];
      try {
        j.result = execute_run(j.config, out / j.name);
      } catch (const std::exception& e) {
        j.error = e.what();
      }
      std::lock_guard lock(log_mutex);
      log << (j.error.empty() ? "done   " : "failed ") << j.name
          << (j.error.empty() ? "" : ": " + j.error) << '\n';
    }
  };
  const std::size_t n_threads = std::min(options.jobs, jobs.size());
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  // Differences against the smallest-dt run sharing (p, mu).
  std::ostringstream table;
  table << "name,p,mu,dt,termination,steps,t,l2_norm,energy,lambda,stat_residual,"
           "energy_eq_residual,energy_diff_vs_finest,lambda_diff_vs_finest\n";
  bool ok = true;
  for (const auto& j : jobs) {
    const Job* finest = nullptr;
    for (const auto& k : jobs) {
      if (k.config.flow.p == j.config.flow.p && k.config.flow.yosida_mu == j.config.flow.yosida_mu &&
          k.result && (finest == nullptr || k.config.flow.dt < finest->config.flow.dt)) {
        finest = &k;
      }
    }
    table << j.name << ',' << format_double(j.config.flow.p) << ','
          << (j.config.flow.yosida_mu ? format_double(*j.config.flow.yosida_mu) : "") << ','
          << format_double(j.config.flow.dt) << ',';
    if (!j.result) {
      ok = false;
      table << "error,,,,,,,,,\n";
      continue;
    }
    const auto& r = *j.result;
    if (r.termination == Termination::solver_failure) ok = false;
    const auto& last = r.series.back();
    const auto& ref = finest->result->series.back();
    table << to_string(r.termination) << ',' << r.steps_taken << ',' << format_double(last.t) << ','
          << format_double(last.l2_norm) << ',' << format_double(last.energy) << ','
          << format_double(last.lambda) << ',' << format_double(last.stat_residual) << ','
          << format_double(last.energy_eq_residual) << ','
          << format_double(std::abs(last.energy - ref.energy)) << ','
          << format_double(std::abs(last.lambda - ref.lambda)) << '\n';
  }
  write_text(out / "sweep.csv", table.str());
  log << "wrote " << (out / "sweep.csv").string() << " (" << jobs.size() << " runs)\n";
  return ok ? kExitOk : kExitFailure;
}

std::vector<SpectrumRow> lowest_eigenvalues(const Domain& domain, std::size_t m) {
  const int dim = domain.dim();
  std::vector<std::size_t> extent(static_cast<std::size_t>(dim));
  std::size_t combos = 1;
  for (int a = 0; a < dim; ++a) {
    extent[static_cast<std::size_t>(a)] = std::min(m, domain.size(a));
    combos *= extent[static_cast<std::size_t>(a)];
  }
  std::vector<SpectrumRow> rows;
  rows.reserve(combos);
  std::vector<std::size_t> k(static_cast<std::size_t>(dim), 1);
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t rem = c;
    SpectrumRow row;
    for (int a = dim - 1; a >= 0; --a) {
      const auto ua = static_cast<std::size_t>(a);
      k[ua] = rem % extent[ua] + 1;
      rem /= extent[ua];
    }
    for (int a = 0; a < dim; ++a) {
      const double kk = static_cast<double>(k[static_cast<std::size_t>(a)]);
      row.discrete += domain.axis_eigenvalue(a, k[static_cast<std::size_t>(a)]);
      const double w = kk * std::numbers::pi / domain.length(a);
      row.continuum += w * w;
    }
    row.mode = k;
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SpectrumRow& a, const SpectrumRow& b) { return a.discrete < b.discrete; });
  if (rows.size() > m) rows.resize(m);
  return rows;
}

int cmd_spectrum(const GlobalOptions& options, const SpectrumOptions& spec, std::ostream& log) {
  Domain domain;
  if (!spec.sizes.empty()) {
    std::vector<double> lengths;
    for (const auto& s : spec.lengths) lengths.push_back(parse_length(s));
    if (lengths.empty()) lengths.assign(spec.sizes.size(), std::numbers::pi);
    if (lengths.size() == 1 && spec.sizes.size() > 1) lengths.assign(spec.sizes.size(), lengths[0]);
    try {
      domain = make_domain(static_cast<int>(spec.sizes.size()), lengths, spec.sizes);
    } catch (const InvalidArgument& e) {
      throw ValidationError(e.what());
    }
  } else if (options.config) {
    domain = load_config(options).domain.build();
  } else {
    throw ValidationError("spectrum needs --config or --n");
  }
  if (spec.count == 0) throw ValidationError("-m must be at least 1");
  const auto rows = lowest_eigenvalues(domain, spec.count);

  std::ostringstream csv;
  csv << "index,mode,discrete,continuum,relative_difference\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string mode;
    for (std::size_t a = 0; a < rows[i].mode.size(); ++a) mode += (a ? "x" : "") + std::to_string(rows[i].mode[a]);
    csv << i + 1 << ',' << mode << ',' << format_double(rows[i].discrete) << ','
        << format_double(rows[i].continuum) << ','
        << format_double((rows[i].discrete - rows[i].continuum) / rows[i].continuum) << '\n';
  }
  log << csv.str();
  if (options.out) {
    prepare_output_dir(*options.out);
    write_text(*options.out / "spectrum.csv", csv.str());
  }
  return kExitOk;
}

}  // namespace sphereflow::cli
