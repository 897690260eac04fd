#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "slk/experiments.hpp"

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Flags {
  slk::ExperimentConfig cfg;
  std::string config_path;
  std::string table_path;
};

void add_flags(CLI::App* sub, Flags& f) {
  auto& c = f.cfg;
  sub->add_option("--alpha", c.alpha, "Stability index in (0, 2)");
  sub->add_option("--beta", c.beta, "Hölder exponent of f in (0, 1)");
  sub->add_option("--dim", c.dim, "Dimension (1 or 2)");
  sub->add_option("--kernel", c.kernel.name, "Kernel preset: constant, holder, mixed, bumped");
  sub->add_option("--kernel-a", c.kernel.a, "Constant coefficient value");
  sub->add_option("--kernel-amp", c.kernel.amp, "Oscillation amplitude of the preset");
  sub->add_option("--kernel-beta", c.kernel.beta, "Hölder exponent of the coefficient in x");
  sub->add_option("--field", c.fields, "Field id (repeatable)");
  sub->add_option("--grid", c.grids, "Grid size (repeatable)");
  sub->add_option("--lambda", c.lambda, "Resolvent parameter");
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--t", c.t, "Time");
  sub->add_option("--xmax", c.xmax, "Half-width of the density table");
  sub->add_option("--n", c.n, "Number of table points");
  sub->add_option("--xi", c.xi, "Wave number");
  sub->add_option("--gamma", c.gamma, "Hölder exponent for difference audits");
  sub->add_option("--zero-order", c.zero_order, "Zero-order term id: damp, const-V");
  sub->add_option("--drift", c.drift, "Drift id: sin, const-V");
  sub->add_option("--dump-matrix", c.dump_matrix, "Write the assembled matrix (SLKO format)");
  sub->add_option("--x0", c.x0, "Freezing point");
  sub->add_option("--eps", c.eps, "Freezing oscillation threshold");
  sub->add_option("--r", c.r_list, "Radius (repeatable)");
  sub->add_option("--delta", c.delta, "Coefficient roughness deficit");
  sub->add_option("--output,-o", c.output, "Report path (stdout when empty)");
  sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--config", f.config_path, "JSON config; its keys override flags");
  sub->add_option("--table", f.table_path, "Write the plot-ready table as CSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schauder estimates for stable-like operators: verification toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", slk::kToolkitVersion);
  Flags flags;
  for (const auto& name : slk::command_names()) add_flags(app.add_subcommand(name, "Run the " + name + " audits"), flags);
  CLI11_PARSE(app, argc, argv);

  try {
    auto& cfg = flags.cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    if (!flags.config_path.empty()) {
      std::ifstream is(flags.config_path);
      if (!is) throw slk::InvalidArgument("cannot read config " + flags.config_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(is);
      } catch (const nlohmann::json::exception& e) {
        throw slk::InvalidArgument(std::string("config is not valid JSON: ") + e.what());
      }
      cfg = slk::config_from_json(j, cfg);
    }
    auto report = slk::run(cfg);
    report.timestamp = utc_now();
    const auto format = slk::parse_format(cfg.format);
    if (cfg.output.empty()) std::cout << slk::emit(report, format);
    else slk::emit_to_file(report, format, cfg.output);
    if (!flags.table_path.empty()) {
      std::ofstream os(flags.table_path);
      if (!os) throw slk::InvalidArgument("cannot write table to " + flags.table_path);
      os << slk::emit_table(report.table);
    }
    for (const auto& r : report.records)
      if (!r.pass) std::cerr << "FAIL " << r.audit_id << " " << r.field_id << (r.note.empty() ? "" : ": " + r.note) << "\n";
    return report.global_pass ? 0 : 1;
  } catch (const slk::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
