#include <exception>
#include <sstream>

#include "CLI11.hpp"
#include "sphereflow/cli/commands.hpp"
#include "sphereflow/cli/output.hpp"

namespace sphereflow::cli {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Norm-preserving nonlinear heat flow on Dirichlet boxes", "sphereflow"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  app.add_option("--config", config, "INI configuration file");
  app.add_option("--out", out_dir, "Output directory (default ./out)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random initial data and verify suites");
  app.add_option("--jobs", g.jobs, "Concurrent sweep subruns")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Time-series format")->check(CLI::IsMember({"csv"}));

  auto* run = app.add_subcommand("run", "Integrate the flow and write time series, snapshots and plot data");
  auto* stationary = app.add_subcommand("stationary", "Drive the normalized flow to a stationary state");
  std::optional<double> tol;
  stationary->add_option("--tol", tol, "Stationarity residual target (overrides flow.stationary_tol)");
  auto* verify = app.add_subcommand("verify", "Run a property suite");
  std::string suite;
  verify->add_option("suite", suite, "nonlinearity, modified, surjectivity, resolvent, yosida, energy, theta or all")
      ->required();
  auto* sweep = app.add_subcommand("sweep", "Cross product of dt, p and mu values, one subdirectory each");
  SweepOptions sw;
  sweep->add_option("--dt", sw.dts, "Time steps")->delimiter(',');
  sweep->add_option("--p", sw.ps, "Exponents")->delimiter(',');
  sweep->add_option("--mu", sw.mus, "Yosida parameters")->delimiter(',');
  auto* spectrum = app.add_subcommand("spectrum", "Lowest discrete eigenvalues against the continuum");
  SpectrumOptions sp;
  spectrum->add_option("-m,--count", sp.count, "Number of eigenvalues");
  spectrum->add_option("--n", sp.sizes, "Interior nodes per axis")->delimiter(',');
  spectrum->add_option("--length", sp.lengths, "Side lengths, e.g. pi or 2pi")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (!config.empty()) g.config = config;
  if (!out_dir.empty()) g.out = out_dir;
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*run) return cmd_run(g, out);
    if (*stationary) return cmd_stationary(g, tol, out);
    if (*verify) return cmd_verify(suite, g, out);
    if (*sweep) return cmd_sweep(g, sw, out);
    if (*spectrum) return cmd_spectrum(g, sp, out);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace sphereflow::cli
