#include <CLI11.hpp>
#include <cstdint>
#include <optional>
#include <string>

#include "cise/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Invariant-set synthesis and safety filtering for planar control-affine systems"};
  app.require_subcommand(1);

  std::string config;
  std::string boundary;
  std::string out = "out";
  std::uint64_t seed = 0;

  CLI::App* expand = app.add_subcommand("expand", "Grow an invariant set from the configured seed");
  expand->add_option("--config", config, "Config file")->required();
  expand->add_option("--out", out, "Output directory");

  CLI::App* verify = app.add_subcommand("verify", "Certify a boundary CSV segment by segment");
  verify->add_option("--config", config, "Config file")->required();
  verify->add_option("--boundary", boundary, "Boundary CSV")->required();

  CLI::App* simulate = app.add_subcommand("simulate", "Run filtered closed-loop trajectories");
  simulate->add_option("--config", config, "Config file")->required();
  simulate->add_option("--boundary", boundary, "Boundary CSV")->required();
  simulate->add_option("--out", out, "Output directory");
  CLI::Option* seed_opt = simulate->add_option("--seed", seed, "Override [filter] seed");

  CLI::App* kernel = app.add_subcommand("kernel", "Compute the gridded viability kernel");
  kernel->add_option("--config", config, "Config file")->required();
  kernel->add_option("--out", out, "Output directory");

  CLI::App* sdf = app.add_subcommand("sdf", "Export a signed-distance grid for a boundary");
  sdf->add_option("--config", config, "Config file")->required();
  sdf->add_option("--boundary", boundary, "Boundary CSV")->required();
  sdf->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cise::kExitConfig;
  }

  if (expand->parsed()) return cise::cmd_expand(config, out);
  if (verify->parsed()) return cise::cmd_verify(config, boundary);
  if (simulate->parsed()) {
    std::optional<std::uint64_t> s;
    if (seed_opt->count() > 0) s = seed;
    return cise::cmd_simulate(config, boundary, out, s);
  }
  if (kernel->parsed()) return cise::cmd_kernel(config, out);
  return cise::cmd_sdf(config, boundary, out);
}
