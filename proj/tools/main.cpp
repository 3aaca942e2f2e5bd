#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "itef/charroots.hpp"

using namespace itef::cli;

namespace {

// Flags given on the command line, applied after the config file.
struct Flags {
  std::map<std::string, std::string> kv;
  std::string config;

  void add(CLI::App* app) {
    app->add_option("--config", config, "key=value config file");
    for (const char* key : {"omega", "radius", "r0", "n_r", "n_theta", "enrich", "kappa", "lambda", "n_modes",
                            "fit_lo", "fit_hi", "eps", "out_dir", "cache_dir", "seed", "threads", "workers",
                            "cache"}) {
      std::string flag = std::string("--") + key;
      for (char& c : flag) {
        if (c == '_') c = '-';
      }
      app->add_option_function<std::string>(flag, [this, key](const std::string& v) { kv[key] = v; },
                                            std::string("config key ") + key);
    }
    app->add_option_function<std::string>("--modes", [this](const std::string& v) { kv["n_modes"] = v; },
                                          "alias of --n-modes");
    app->add_flag_callback("--svg", [this] { kv["svg"] = "on"; }, "write SVG plots");
    app->add_flag_callback("--vanish", [this] { kv["vanish"] = "on"; }, "pipeline in convex-vanishing mode");
    app->add_flag_callback("--no-enrich", [this] { kv["enrich"] = "off"; }, "disable singular enrichment");
    app->add_flag_callback("--no-cache", [this] { kv["cache"] = "off"; }, "bypass the matrix cache");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config.empty()) apply_config(cfg, read_config_file(config));
    apply_config(cfg, kv);
    validate(cfg);
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interior transmission eigenfunctions on sectors: corner singularities, spectra, localization"};
  app.footer(describe_outputs() + "\n" + describe_keys());
  app.require_subcommand(1);

  Flags flags;
  int root_index = 1, samples = 201;
  std::string action;

  struct Sub {
    const char* name;
    const char* help;
  };
  std::map<std::string, CLI::App*> subs;
  for (const Sub s : {Sub{"roots", "roots of the clamped characteristic determinant, Re z in (0, 1)"},
                      Sub{"omega0", "threshold angle: root of tan w = w in (pi, 3pi/2)"},
                      Sub{"angular", "angular profile of a real root"},
                      Sub{"spectrum", "K-eigenmodes and ITEV pairs"},
                      Sub{"localize", "singular functional, c1 and blow-up fits (non-convex)"},
                      Sub{"vanish", "corner averages of v and w (convex)"},
                      Sub{"pipeline", "roots, spectrum and corner report with summary"},
                      Sub{"cache", "inspect or clear the matrix cache"}}) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    flags.add(sub);
    subs[s.name] = sub;
  }
  subs["angular"]->add_option("--root", root_index, "1-based index among the real roots")->capture_default_str();
  subs["angular"]->add_option("--samples", samples, "grid points on [0, omega]")->capture_default_str();
  subs["cache"]->add_option("action", action, "inspect | clear")->required()->check(CLI::IsMember({"inspect", "clear"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    const RunConfig cfg = flags.resolve();
    if (*subs["roots"]) return cmd_roots(cfg, std::cout, std::cerr);
    if (*subs["omega0"]) return cmd_omega0(std::cout);
    if (*subs["angular"]) return cmd_angular(cfg, root_index, samples, std::cout, std::cerr);
    if (*subs["spectrum"]) return cmd_spectrum(cfg, std::cerr);
    if (*subs["localize"]) return cmd_localize(cfg, std::cerr);
    if (*subs["vanish"]) return cmd_vanish(cfg, std::cerr);
    if (*subs["pipeline"]) return cmd_pipeline(cfg, std::cerr);
    if (*subs["cache"]) return cmd_cache(cfg, action, std::cout, std::cerr);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
