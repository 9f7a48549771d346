#include "fourierctl/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fourierctl/campaign_runner.hpp"
#include "fourierctl/csv_io.hpp"
#include "fourierctl/errors.hpp"
#include "fourierctl/json_io.hpp"

namespace fourierctl {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> k_min;
  std::optional<int> k_max;
  std::optional<std::string> mode;
  std::optional<int> jobs;
};

void add_common_options(CLI::App& command, Options& o) {
  command.add_option("--config", o.config_path, "JSON configuration file");
  command.add_option("--out", o.out_dir, "Output directory (created if missing)");
  command.add_option("--seed", o.seed, "Base random seed");
  command.add_option("--trials", o.trials, "Number of independent trials");
  command.add_option("--k-min", o.k_min, "Smallest harmonic count");
  command.add_option("--k-max", o.k_max, "Largest harmonic count");
  command.add_option("--mode", o.mode, "Campaign mode: iterative or noniterative");
  command.add_option("--jobs", o.jobs, "Concurrent cost evaluations");
}

Json load_document(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("configuration file '" + path + "' is not valid JSON: " + e.what());
  }
}

void apply_overrides(const Options& o, RunSettings& settings, std::vector<std::string>& violations) {
  CampaignConfig& c = settings.campaign;
  if (o.seed) c.base_seed = *o.seed;
  if (o.trials) c.trials = *o.trials;
  if (o.k_min) c.k_min = *o.k_min;
  if (o.k_max) c.k_max = *o.k_max;
  if (o.k_min && !o.k_max && c.k_max < c.k_min) c.k_max = c.k_min;
  if (o.mode) {
    try {
      c.mode = campaign_mode_from_string(*o.mode);
    } catch (const ConfigError& e) {
      violations.push_back(std::string("--mode: ") + e.what());
    }
  }
  if (o.jobs) {
    c.de.jobs = *o.jobs;
    c.de.parallel_evaluations = *o.jobs > 1;
  }
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

void write_json(const fs::path& dir, const std::string& name, const Json& value) {
  std::ofstream out = open_output(dir, name);
  out << std::setw(2) << value << '\n';
}

int run_simulate(const RunSettings& settings, const fs::path& dir, std::ostream& out) {
  if (!settings.control) throw ConfigError("simulate needs a 'control' section");
  const CampaignConfig& c = settings.campaign;
  const FourierControl control = resolve_control(*settings.control, c);
  const Trajectory<4> run = simulate_control(control, c, true);

  fs::create_directories(dir);
  {
    std::ofstream f = open_output(dir, "trajectory.csv");
    write_trajectory_csv(f, run);
  }
  {
    std::ofstream f = open_output(dir, "events.csv");
    write_events_csv(f, run);
  }
  {
    std::ofstream f = open_output(dir, "control.csv");
    write_control_csv(f, control, c.t0, c.tf);
  }
  const double z = run.final_state[2];
  out << "z(tf) = " << format_number(z) << '\n'
      << "distance = " << format_number(std::abs(z)) << '\n'
      << "transitions = " << run.events.size() << '\n'
      << "accepted_steps = " << run.accepted_steps << '\n';
  if (run.flagged_steps > 0) {
    out << "warning: " << run.flagged_steps << " accepted steps with non-positive contact load\n";
  }
  return kExitSuccess;
}

int run_optimize(const RunSettings& settings, const fs::path& dir, std::ostream& out) {
  CampaignConfig c = settings.campaign;
  const int k = c.k_min;
  DeConfig de = c.de;
  de.rng_seed = c.base_seed;

  std::vector<std::vector<double>> seeds;
  if (settings.control && settings.control->decision) {
    if (settings.control->harmonics != k) {
      throw ConfigError("control seed has K=" + std::to_string(settings.control->harmonics) +
                        " but optimize runs K=" + std::to_string(k));
    }
    seeds.push_back(*settings.control->decision);
  }

  const Objective objective = [&c, k](std::span<const double> v) { return evaluate_cost(v, k, c); };
  const OptimizationResult result = optimize(objective, decision_bounds(k, c), de, seeds);
  if (!std::isfinite(result.best_cost)) throw std::runtime_error("no candidate produced a finite cost");

  const auto [shape, span] = split_decision(result.best_vector, k);
  Json doc{{"harmonics", k},
           {"decision", result.best_vector},
           {"shape", shape},
           {"span", span},
           {"control", control_from_decision(result.best_vector, k, c)},
           {"distance", -result.best_cost},
           {"optimization", result},
           {"config", c}};
  fs::create_directories(dir);
  write_json(dir, "result.json", doc);
  out << "K = " << k << ", distance = " << format_number(-result.best_cost) << " after "
      << result.generations << " generations (" << result.evaluation_count << " evaluations)\n";
  return kExitSuccess;
}

void print_summary(const CampaignRecord& record, std::ostream& out) {
  out << "approach: " << to_string(record.mode) << '\n';
  out << std::setw(4) << "K" << std::setw(20) << "distance" << std::setw(12) << "SD" << std::setw(14)
      << "change %" << '\n';
  for (const KSummary& s : record.summary) {
    std::ostringstream change;
    if (s.relative_change) change << std::fixed << std::setprecision(2) << *s.relative_change;
    out << std::setw(4) << s.harmonics << std::setw(20) << std::fixed << std::setprecision(3)
        << s.mean_distance << std::setw(12) << s.sd_distance << std::setw(14) << change.str() << '\n';
    out.unsetf(std::ios::floatfield);
  }
}

int run_campaign_command(const RunSettings& settings, const fs::path& dir, std::ostream& out,
                         std::ostream& err) {
  const CampaignConfig& c = settings.campaign;
  const CampaignRecord record = run_campaign(c);

  fs::create_directories(dir);
  {
    std::ofstream f = open_output(dir, "summary.csv");
    write_summary_csv(f, record);
  }
  {
    std::ofstream f = open_output(dir, "delta_matrix.csv");
    write_delta_matrix_csv(f, record);
  }
  Json doc = record;
  doc["config"] = c;
  write_json(dir, "records.json", doc);

  if (const TrialRecord* best = record.best()) {
    const FourierControl control = control_from_decision(best->decision, best->harmonics, c);
    const Trajectory<4> run = simulate_control(control, c, true);
    std::ofstream traj = open_output(dir, "best_trajectory.csv");
    write_trajectory_csv(traj, run);
    std::ofstream ctrl = open_output(dir, "best_control.csv");
    write_control_csv(ctrl, control, c.t0, c.tf);
  }

  print_summary(record, out);
  for (const std::string& note : record.notes) out << "note: " << note << '\n';

  if (!record.failures.empty()) {
    write_json(dir, "failures.json", Json{{"failures", record.failures}, {"diagnostics", record.diagnostics}});
    for (const TrialFailure& f : record.failures) {
      err << "trial " << f.trial << " failed at K=" << f.harmonics << ": " << f.message << '\n';
    }
    return kExitRuntimeFailure;
  }
  return kExitSuccess;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fourier-series open-loop control of a pendulum capsule drive"};
  app.require_subcommand(1);
  Options o;
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate one control and write trajectory CSVs");
  CLI::App* optimize_cmd = app.add_subcommand("optimize", "Optimize one harmonic count (K = k_min)");
  CLI::App* campaign = app.add_subcommand("campaign", "Run a multi-trial campaign over K");
  CLI::App* validate = app.add_subcommand("validate", "Check a configuration without simulating");
  for (CLI::App* command : {simulate, optimize_cmd, campaign, validate}) add_common_options(*command, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  RunSettings settings;
  try {
    std::vector<std::string> violations;
    settings = parse_settings(load_document(o.config_path), violations);
    apply_overrides(o, settings, violations);
    for (std::string& v : check_settings(settings)) violations.push_back(std::move(v));
    if (!violations.empty()) {
      for (const std::string& v : violations) err << "violation: " << v << '\n';
      return kExitConfigError;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  const fs::path dir(o.out_dir);
  try {
    if (validate->parsed()) {
      out << "ok\n";
      return kExitSuccess;
    }
    if (simulate->parsed()) return run_simulate(settings, dir, out);
    if (optimize_cmd->parsed()) return run_optimize(settings, dir, out);
    return run_campaign_command(settings, dir, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeFailure;
  }
}

}  // namespace fourierctl
