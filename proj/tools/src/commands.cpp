#include "gptd_app/commands.hpp"

#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

#include "gptd/error.hpp"
#include "gptd/io.hpp"
#include "gptd/report.hpp"
#include "gptd_app/experiment.hpp"

namespace gptd::app {
namespace fs = std::filesystem;

namespace {

void prepare_output(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::string tag(const VariantReport& r) { return std::string(short_name(r.spec.variant())); }

// Optimized parameters per configured variant, taken from a fit report.
std::vector<std::optional<HyperParams>> thetas_from_report(const RunConfig& config, int dim) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(*config.report));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("report '" + config.report->string() + "': " + e.what());
  }
  std::vector<std::optional<HyperParams>> out;
  for (Variant v : config.variants) {
    const CovarianceSpec spec = make_spec(v, dim, config.factor_rank);
    std::optional<HyperParams> theta;
    for (const auto& entry : j.value("variants", nlohmann::json::array())) {
      if (!entry.value("ok", false)) continue;
      try {
        if (spec_from_json(entry.at("covariance")) == spec) theta = theta_from_json(spec, entry.at("theta"));
      } catch (const nlohmann::json::exception& e) {
        throw IoError("report '" + config.report->string() + "': " + e.what());
      }
    }
    if (!theta)
      throw ConfigError("report has no successful entry for " + spec.describe());
    out.push_back(std::move(theta));
  }
  return out;
}

int finish(const std::vector<VariantFit>& fits, std::ostream& log) {
  int ok = 0;
  for (const auto& f : fits) {
    if (f.report.ok) {
      ++ok;
      log << tag(f.report) << ": log-likelihood " << f.report.likelihood.total
          << (f.report.converged ? "" : " (not converged)") << '\n';
    } else {
      log << tag(f.report) << ": failed: " << f.report.error << '\n';
    }
  }
  return ok == 0 ? kExitAllVariantsFailed : kExitOk;
}

void write_prediction_grids(const fs::path& dir, const std::vector<VariantFit>& fits,
                            const GroundTruth& truth) {
  for (const auto& f : fits) {
    if (!f.report.ok) continue;
    write_value_grid_csv(dir / ("grid_" + tag(f.report) + ".csv"), predict_grid(*f.posterior, truth.grid));
    if (f.sparse)
      write_value_grid_csv(dir / ("sparse_grid_" + tag(f.report) + ".csv"),
                           predict_grid(*f.sparse, truth.grid));
  }
}

}  // namespace

int cmd_simulate(const RunConfig& config, std::ostream& log) {
  config.validate();
  prepare_output(config.output_dir);
  const Simulation sim = simulate(config);
  write_trajectory_csv(config.output_dir / "trajectory.csv", sim.trajectory);
  write_text(config.output_dir / "manifest.json", dump_report(sim.manifest));
  log << "simulated " << sim.trajectory.num_transitions() << " transitions, " << sim.episodes
      << " episodes -> " << (config.output_dir / "trajectory.csv").string() << '\n';
  return kExitOk;
}

int cmd_fit(const RunConfig& config, std::ostream& log) {
  config.validate();
  prepare_output(config.output_dir);
  const Trajectory traj = load_or_simulate(config);
  if (!config.trajectory) write_trajectory_csv(config.output_dir / "trajectory.csv", traj);
  const auto truth = ground_truth(config);
  const auto fits = fit_variants(config, traj, truth ? &*truth : nullptr, {});
  const ComparisonReport report = comparison_report(config, traj, fits);
  nlohmann::json j = to_json(report);
  j["config"] = to_json(config);
  write_text(config.output_dir / "report.json", dump_report(j));
  for (const auto& f : fits)
    if (f.report.ok)
      write_text(config.output_dir / ("theta_" + tag(f.report) + ".json"),
                 dump_report(to_json(f.report.spec, f.report.theta)));
  if (truth) write_prediction_grids(config.output_dir, fits, *truth);
  return finish(fits, log);
}

int cmd_profile(const RunConfig& config, std::ostream& log) {
  config.validate();
  prepare_output(config.output_dir);
  const Trajectory traj = load_or_simulate(config);
  FitOptions options;
  options.profile = true;
  if (config.report) {
    options.optimize = false;
    options.initial = thetas_from_report(config, traj.dim());
  }
  const auto fits = fit_variants(config, traj, nullptr, options);
  for (const auto& f : fits) {
    if (!f.report.ok) continue;
    write_spectrum_csv(config.output_dir / ("eigenspectrum_" + tag(f.report) + ".csv"), f.report.eigenspectrum);
    write_icd_csv(config.output_dir / ("icd_" + tag(f.report) + ".csv"), f.report.icd);
  }
  nlohmann::json j = to_json(comparison_report(config, traj, fits));
  for (std::size_t i = 0; i < fits.size(); ++i) {
    if (!fits[i].report.ok) continue;
    auto icd = nlohmann::json::array();
    for (const auto& e : fits[i].report.icd)
      icd.push_back({{"tol", e.tol}, {"m", e.m}, {"frob_error", e.frob_error}});
    j["variants"][i]["icd_profile"] = std::move(icd);
  }
  write_text(config.output_dir / "profile.json", dump_report(j));
  return finish(fits, log);
}

int cmd_eval_grid(const RunConfig& config, std::ostream& log) {
  config.validate();
  const auto truth = ground_truth(config);
  if (!truth) throw ConfigError("eval-grid needs a gridworld or pendulum experiment");
  prepare_output(config.output_dir);
  write_value_grid_csv(config.output_dir / "truth_grid.csv", truth->grid);
  log << "wrote " << (config.output_dir / "truth_grid.csv").string() << '\n';
  if (!config.report) return kExitOk;

  const Trajectory traj = load_or_simulate(config);
  FitOptions options;
  options.optimize = false;
  options.initial = thetas_from_report(config, traj.dim());
  const auto fits = fit_variants(config, traj, &*truth, options);
  write_prediction_grids(config.output_dir, fits, *truth);
  nlohmann::json j = to_json(comparison_report(config, traj, fits));
  write_text(config.output_dir / "eval.json", dump_report(j));
  return finish(fits, log);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian-process temporal-difference policy evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::vector<std::string> variants;
  double sparse_tol = 0.0;
  Index max_subset = 0;
  std::string out_dir;
  std::string trajectory;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (JSON)");
    sub->add_option("--seed", seed, "Seed for every random stream");
    sub->add_option("--variant", variants, "Covariance variant: iso, ard or fa (repeatable)")
        ->check(CLI::IsMember({"iso", "ard", "fa"}));
    sub->add_option("--sparse-tol", sparse_tol, "Enable subset-of-regressors inference at this ICD tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-subset", max_subset, "Largest ICD subset")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "Output directory");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "Roll out the configured environment");
  CLI::App* fit = app.add_subcommand("fit", "Optimize hyperparameters and fit every variant");
  CLI::App* profile = app.add_subcommand("profile", "Eigenspectrum and ICD profile at optimized parameters");
  CLI::App* eval_grid = app.add_subcommand("eval-grid", "Write true and predicted value grids");
  for (CLI::App* sub : {simulate, fit, profile, eval_grid}) add_common(sub);
  for (CLI::App* sub : {fit, profile, eval_grid})
    sub->add_option("trajectory", trajectory, "Trajectory CSV (simulated when omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    RunConfig config = config_path.empty() ? default_config(Experiment::Gridworld) : load_config(config_path);
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) config.seed = seed;
    if (!variants.empty()) {
      config.variants.clear();
      for (const auto& v : variants) config.variants.push_back(parse_variant(v));
    }
    if (sub->count("--sparse-tol")) {
      config.sparse.enabled = true;
      config.sparse.tol = sparse_tol;
    }
    if (sub->count("--max-subset")) {
      config.sparse.enabled = true;
      config.sparse.max_subset = max_subset;
    }
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (!trajectory.empty()) config.trajectory = trajectory;

    if (sub == simulate) return cmd_simulate(config, err);
    if (sub == fit) return cmd_fit(config, err);
    if (sub == profile) return cmd_profile(config, err);
    return cmd_eval_grid(config, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ContractViolation& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace gptd::app
