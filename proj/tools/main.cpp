#include <iostream>

#include <fmt/format.h>

#include "commands.hpp"
#include "srg/errors.hpp"

namespace {

// 0 success, 1 failed check, 2 config error, 3 non-convergence, 4 precondition violation
int report(const char* kind, const std::exception& e, int code) {
  std::cerr << fmt::format("srg: {}: {}\n", kind, e.what());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-Riemannian geometry toolkit: flags, tangent cones, CC distances, perimeters, blowups"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "INI file, one [section] per subcommand");
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.require_subcommand(1);
  const auto cmds = srg::cli::register_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (const auto& c : cmds)
      if (c.app->parsed()) return c.run();
  } catch (const srg::CharacteristicPoint& e) {
    std::cerr << fmt::format("srg: refused at characteristic point ({}): {}\n", fmt::join(e.point(), ", "), e.what());
    return 4;
  } catch (const srg::PreconditionError& e) {
    return report("precondition violated", e, 4);
  } catch (const srg::NonConvergence& e) {
    return report("no convergence", e, 3);
  } catch (const srg::ParseError& e) {
    return report("config error", e, 2);
  } catch (const srg::InvalidInput& e) {
    return report("config error", e, 2);
  } catch (const srg::Error& e) {
    return report("error", e, 1);
  }
  return 2;
}
