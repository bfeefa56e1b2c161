#include <iostream>

#include "commands.hpp"
#include "rpl/errors.hpp"
#include "rpl/parallel.hpp"

int main(int argc, char** argv) {
  using namespace rpt;
  CLI::App app{"Reflection-positivity numerics toolkit", "rp_toolkit"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  auto commands = register_commands(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every other parse error is a usage error.
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }
  for (auto& cmd : commands) {
    if (!cmd->selected()) continue;
    try {
      if (!cmd->config_path.empty()) {
        const json cfg = json::parse(rpl::read_text_file(cmd->config_path));
        rpl::require(cfg.is_object(), "config file must hold a JSON object");
        cmd->merge(cfg);
      }
      rpl::require(cmd->threads >= 0, "threads must be >= 0");
      rpl::set_threads(cmd->threads);
      return cmd->body(*cmd);
    } catch (const rpl::ValidationError& e) {
      std::cerr << "rp_toolkit " << cmd->name() << ": invalid input: " << e.what() << "\n";
      return kExitInvalid;
    } catch (const json::exception& e) {
      std::cerr << "rp_toolkit " << cmd->name() << ": bad config: " << e.what() << "\n";
      return kExitInvalid;
    } catch (const rpl::ToleranceError& e) {
      std::cerr << "rp_toolkit " << cmd->name() << ": tolerance not met: " << e.what() << "\n";
      return kExitFailed;
    } catch (const std::exception& e) {
      std::cerr << "rp_toolkit " << cmd->name() << ": " << e.what() << "\n";
      return kExitInvalid;
    }
  }
  return kExitInvalid;
}
