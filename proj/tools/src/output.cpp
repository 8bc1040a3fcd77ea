#include "sphereflow/cli/output.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace sphereflow::cli {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

void write_timeseries_csv(std::ostream& out, std::span<const DiagnosticsRecord> series) {
  out << "t,l2_norm,energy,grad_sq,lp_p,lambda,stat_residual,cum_dissipation,"
         "energy_eq_residual,frac_alpha,frac_beta\n";
  for (const auto& r : series) {
    out << format_double(r.t) << ',' << format_double(r.l2_norm) << ',' << format_double(r.energy)
        << ',' << format_double(r.grad_sq) << ',' << format_double(r.lp_p) << ','
        << format_double(r.lambda) << ',' << format_double(r.stat_residual) << ','
        << format_double(r.cum_dissipation) << ',' << format_double(r.energy_eq_residual) << ','
        << (r.frac_alpha ? format_double(*r.frac_alpha) : "") << ','
        << (r.frac_beta ? format_double(*r.frac_beta) : "") << '\n';
  }
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

std::vector<std::filesystem::path> write_plotdata(const std::filesystem::path& dir,
                                                  std::span<const DiagnosticsRecord> series) {
  double e_min = 0.0;
  if (!series.empty()) {
    e_min = std::min_element(series.begin(), series.end(), [](const auto& a, const auto& b) {
              return a.energy < b.energy;
            })->energy;
  }
  std::ostringstream energy;
  std::ostringstream norm;
  std::ostringstream residual;
  energy << "# t  E(t)-E_min\n";
  norm << "# t  ||u(t)||-1\n";
  residual << "# t  ||grad_M E(u(t))||\n";
  for (const auto& r : series) {
    const std::string t = format_double(r.t);
    energy << t << ' ' << format_double(r.energy - e_min) << '\n';
    norm << t << ' ' << format_double(r.l2_norm - 1.0) << '\n';
    residual << t << ' ' << format_double(r.stat_residual) << '\n';
  }
  std::vector<std::filesystem::path> paths{dir / "energy_decay.dat", dir / "norm_drift.dat",
                                           dir / "residual.dat"};
  write_text(paths[0], energy.str());
  write_text(paths[1], norm.str());
  write_text(paths[2], residual.str());
  return paths;
}

void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  const auto probe = dir / ".sphereflow_write_probe";
  {
    std::ofstream f(probe, std::ios::trunc);
    if (!f) throw IoError("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

Json effective_config_json(const RunConfig& c) {
  const FlowConfig& f = c.flow;
  Json domain;
  domain["dim"] = c.domain.dim;
  domain["lengths"] = c.domain.lengths;
  domain["sizes"] = c.domain.sizes;

  Json flow;
  flow["p"] = f.p;
  flow["integrator"] = std::string(to_string(f.integrator));
  flow["dt"] = f.dt;
  flow["T"] = f.T;
  flow["renormalize"] = f.renormalize;
  flow["multiplier"] = std::string(to_string(f.multiplier));
  flow["sample_every"] = f.sample_every;
  flow["stop_residual"] = f.stop_residual ? Json(*f.stop_residual) : Json(nullptr);
  flow["fixed_point_tol"] = f.fixed_point_tol;
  flow["fixed_point_cap"] = f.fixed_point_cap;
  flow["cg_tol"] = f.linear_solver.rel_tol;
  flow["cg_max_iterations"] = f.linear_solver.max_iterations;
  flow["fractional_norms"] = f.fractional_norms;
  flow["frac_alpha"] = f.frac_alpha;
  flow["frac_beta"] = f.frac_beta;
  flow["seed"] = f.seed;
  flow["initial"] = to_string(c.initial);
  flow["initial_norm"] = c.initial.norm;
  flow["stationary_tol"] = c.stationary_tol;

  Json out;
  out["domain"] = std::move(domain);
  out["flow"] = std::move(flow);
  if (f.cutoff) {
    static constexpr const char* names[] = {"discrete", "continuum", "explicit"};
    out["cutoff"] = {{"K", f.cutoff->K},
                     {"lambda1", f.cutoff->lambda1},
                     {"lambda1_source", names[static_cast<int>(c.cutoff_lambda)]}};
  } else {
    out["cutoff"] = nullptr;
  }
  out["yosida"] = f.yosida_mu ? Json{{"mu", *f.yosida_mu}} : Json(nullptr);
  out["output"] = {{"snapshots", c.output.snapshots}, {"plotdata", c.output.plotdata}};
  return out;
}

Json report_json(const PropertyReport& r) {
  Json params = Json::object();
  for (const auto& [k, v] : r.parameters) params[k] = v;
  Json values = Json::object();
  for (const auto& [k, v] : r.values) values[k] = v;
  return Json{{"name", r.name},
              {"pass", r.pass},
              {"informational", r.informational},
              {"trials", r.trials},
              {"worst_margin", r.worst_margin},
              {"tolerance", r.tolerance},
              {"margin_definition", r.margin_definition},
              {"seed", r.seed},
              {"parameters", std::move(params)},
              {"values", std::move(values)}};
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest make_manifest(const RunConfig& config, std::string command) {
  RunManifest m;
  m.config_digest = sha256_hex(config.source_text);
  m.config_source = config.source_name;
  m.effective_config = effective_config_json(config);
  m.domain = m.effective_config["domain"];
  m.seed = config.flow.seed;
  m.command = std::move(command);
  m.started_utc = utc_timestamp(std::chrono::system_clock::now());
  return m;
}

Json RunManifest::to_json() const {
  Json outs = Json::array();
  for (const auto& p : outputs) outs.push_back(p.generic_string());
  return Json{{"tool", "sphereflow"},
              {"tool_version", tool_version},
              {"command", command},
              {"config_source", config_source},
              {"config_sha256", config_digest},
              {"seed", seed},
              {"domain", domain},
              {"effective_config", effective_config},
              {"outputs", std::move(outs)},
              {"result", result.is_null() ? Json::object() : result},
              {"wall_clock", {{"started_utc", started_utc}, {"elapsed_seconds", wall_seconds}}}};
}

}  // namespace sphereflow::cli
