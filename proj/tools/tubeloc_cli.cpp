// Command-line front end; drives the pipeline through the public C API only.
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "tubeloc/tubeloc.h"

namespace {

struct SessionGuard {
  tubeloc_session* s = nullptr;
  ~SessionGuard() { tubeloc_session_destroy(s); }
};

int run(const std::string& name, tubeloc_status (*stage)(tubeloc_session*, const char*),
        const std::string& config_path, const std::string& out_dir) {
  SessionGuard guard;
  const tubeloc_status created =
      tubeloc_session_create(config_path.empty() ? nullptr : config_path.c_str(), &guard.s);
  if (created != TUBELOC_OK) {
    std::fprintf(stderr, "%s: cannot load config '%s'\n", name.c_str(), config_path.c_str());
    return 2;
  }
  const tubeloc_status status = stage(guard.s, out_dir.c_str());
  if (status != TUBELOC_OK) {
    std::fprintf(stderr, "%s failed: %s\n", name.c_str(), tubeloc_session_last_error(guard.s));
    return 1;
  }
  std::printf("%s: ok (artifacts in %s)\n", name.c_str(), out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tubeloc: zone-classified localization with geometric pose refinement"};
  app.set_version_flag("--version", std::string(tubeloc_version()));
  app.require_subcommand(1);

  struct Cmd {
    const char* name;
    const char* help;
    tubeloc_status (*stage)(tubeloc_session*, const char*);
  };
  const Cmd commands[] = {
      {"generate", "render the synthetic datasets (train + test)", &tubeloc_run_generate},
      {"train", "train the zone embedding and build the descriptor database",
       &tubeloc_run_train},
      {"build-map", "triangulate per-zone landmark maps", &tubeloc_run_build_map},
      {"localize", "localize every test image and write result tables",
       &tubeloc_run_localize},
      {"evaluate", "full pipeline run with an error report", &tubeloc_run_evaluate},
      {"sweep", "zone-count Monte Carlo sweep", &tubeloc_run_sweep},
      {"perturb", "forced-misclassification study", &tubeloc_run_perturb},
  };

  struct Parsed {
    std::string config;
    std::string out;
  };
  std::vector<std::pair<const Cmd*, Parsed>> parsed;
  parsed.reserve(std::size(commands));
  for (const Cmd& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    parsed.emplace_back(&c, Parsed{});
    auto& p = parsed.back().second;
    sub->add_option("--config", p.config, "pipeline config (JSON); defaults when omitted");
    sub->add_option("--out", p.out, "output directory for artifacts")->required();
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& [cmd, p] : parsed) {
    if (app.get_subcommand(cmd->name)->parsed())
      return run(cmd->name, cmd->stage, p.config, p.out);
  }
  std::fprintf(stderr, "no subcommand\n");
  return 2;
}
