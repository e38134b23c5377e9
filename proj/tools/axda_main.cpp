#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "experiments.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

struct SubArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
};

void add_common(CLI::App* sub, SubArgs& args) {
  sub->add_option("--config", args.config_path, "flat key=value config file");
  sub->add_option("--set", args.overrides, "override: key=value (repeatable)");
  sub->add_option("--out", args.out_dir, "output directory")->required();
}

axda::Config load(const SubArgs& args) {
  axda::Config cfg = args.config_path.empty()
                         ? axda::Config::empty()
                         : axda::Config::from_file(args.config_path);
  for (const auto& kv : args.overrides) cfg.set_from_assignment(kv);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AXDA experiments: smoothing bounds, split Gibbs samplers and "
               "penalty optimizers"};
  app.require_subcommand(1);

  using Runner = void (*)(const axda::Config&, const std::filesystem::path&);
  struct Entry {
    const char* name;
    const char* help;
    Runner run;
  };
  const Entry entries[] = {
      {"bounds", "evaluate the TV/Wasserstein bound curves",
       axda::experiments::run_bounds},
      {"gaussian", "multivariate Gaussian bound illustration",
       axda::experiments::run_gaussian},
      {"lasso", "sparse-regression potentials, densities and HPD table",
       axda::experiments::run_lasso},
      {"inpaint", "total-variation image inpainting sampler",
       axda::experiments::run_inpaint},
      {"logistic", "penalized logistic regression sampler and bounds",
       axda::experiments::run_logistic},
      {"optimize", "quadratic-penalty and MCEM optimizers",
       axda::experiments::run_optimize},
  };

  std::vector<SubArgs> args(std::size(entries));
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    CLI::App* sub = app.add_subcommand(entries[i].name, entries[i].help);
    add_common(sub, args[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfigError;
  }

  for (std::size_t i = 0; i < std::size(entries); ++i) {
    CLI::App* sub = app.get_subcommand(entries[i].name);
    if (!sub->parsed()) continue;
    try {
      entries[i].run(load(args[i]), args[i].out_dir);
      return 0;
    } catch (const axda::ConfigError& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return kExitConfigError;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return kExitNumericError;
    }
  }
  return kExitConfigError;
}
