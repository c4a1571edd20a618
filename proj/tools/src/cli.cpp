#include "momentsnet_cli/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "momentsnet/errors.hpp"
#include "momentsnet/experiment.hpp"
#include "momentsnet/formats.hpp"
#include "momentsnet/parallel.hpp"
#include "momentsnet/selfcheck.hpp"

namespace momentsnet::cli {

namespace fs = std::filesystem;

namespace {

using Values = std::map<std::string, std::string, std::less<>>;

const char* help_for(std::string_view key) {
  static const std::map<std::string_view, const char*> help = {
      {"family", "moment family (zernike, tchebichef, ..., or pca)"},
      {"stages", "1 or 2"},
      {"l1", "first-stage filter count"},
      {"l2", "second-stage filter count (defaults to l1)"},
      {"k", "square patch size"},
      {"k1", "patch rows"},
      {"k2", "patch columns"},
      {"h", "square block size"},
      {"h1", "block rows"},
      {"h2", "block columns"},
      {"overlap", "block overlap ratio R in [0, 1)"},
      {"threshold", "binarization threshold t"},
      {"auto-threshold", "pick t so the ones fraction lands in [target-lo, target-hi]"},
      {"target-lo", "lower end of the automatic ones-fraction target"},
      {"target-hi", "upper end of the automatic ones-fraction target"},
      {"reduction", "complex moments to features: modulus or real"},
      {"krawtchouk-p1", "Krawtchouk p along rows"},
      {"krawtchouk-p2", "Krawtchouk p along columns"},
      {"hahn-a", "dual Hahn a"},
      {"hahn-c", "dual Hahn c"},
      {"gpht-s", "radial exponent s of the generalized harmonic families"},
      {"c", "SVM regularisation constant"},
      {"epochs", "SVM training epochs"},
      {"train-fraction", "fraction of each class used for training"},
      {"classes", "synthetic classes (2..9)"},
      {"rotations", "rotations per class (divides 360)"},
      {"replicas", "jittered replicas per rotation"},
      {"size", "synthetic image side"},
      {"shape-seed", "synthetic generator seed"},
      {"seed", "split and training seed"},
      {"jobs", "worker threads (capped by MOMENTSNET_THREADS)"},
      {"dataset", "dataset directory with manifest.csv (synthetic shapes if omitted)"},
      {"out", "output directory"},
      {"timing", "fill the wall_seconds column (makes results.csv non-reproducible)"},
  };
  const auto it = help.find(key);
  return it == help.end() ? "" : it->second;
}

constexpr const char* kConfigHelp = "key=value file with # comments; flags take precedence";

bool is_flag(std::string_view key) { return key == "auto-threshold" || key == "timing"; }

// Registers --key for every experiment parameter, bound to a string slot.
void add_parameters(CLI::App* app, Values& values, const std::vector<std::string_view>& keys) {
  for (auto key : keys) {
    auto& slot = values[std::string(key)];
    std::string name = "--" + std::string(key);
    if (key == "threshold") name += ",--t";
    if (key == "overlap") name += ",--R";
    if (key == "c") name += ",--C";
    if (is_flag(key)) {
      app->add_flag(name + "{true}", slot, help_for(key));
    } else {
      app->add_option(name, slot, help_for(key));
    }
  }
}

// Flat key=value file with # comments, read with CLI11's config parser.
void apply_config_file(ExperimentConfig& config, const std::string& path,
                       const std::vector<std::string_view>& keys) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  for (const auto& item : CLI::ConfigBase().from_config(in)) {
    if (!item.parents.empty()) {
      throw ConfigError("config file " + path + ": sections are not supported");
    }
    if (std::find(keys.begin(), keys.end(), item.name) == keys.end()) {
      throw ConfigError("config file " + path + ": unknown key '" + item.name + "'");
    }
    if (item.inputs.size() != 1) {
      throw ConfigError("config file " + path + ": key '" + item.name + "' needs one value");
    }
    set_parameter(config, item.name, item.inputs.front());
  }
}

ExperimentConfig collect(const CLI::App* app, const Values& values,
                         const std::vector<std::string_view>& keys,
                         const std::string& config_file) {
  ExperimentConfig config;
  if (!config_file.empty()) apply_config_file(config, config_file, keys);
  // parameter_names() order puts k before k1/k2 and h before h1/h2.
  for (auto key : parameter_names()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) continue;
    if (app->count("--" + std::string(key)) == 0) continue;
    set_parameter(config, key, values.find(key)->second);
  }
  return config;
}

void create_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void print_result(std::ostream& out, std::string_view what, const RunResult& r) {
  out << what << ": family=" << family_name(r.net.family.tag) << " stages=" << r.net.stages
      << " L1=" << r.net.l1 << " k=" << r.net.k1 << " h=" << r.net.h1 << " R=" << r.net.overlap
      << " t=" << r.threshold << " ones=" << std::fixed << std::setprecision(4)
      << r.ones_fraction << " train=" << r.train_accuracy << " test=" << r.test_accuracy
      << std::defaultfloat << std::setprecision(6) << " dim=" << r.feature_dim << '\n';
}

int cmd_generate(const ExperimentConfig& config, std::ostream& out) {
  const Dataset ds = generate_shapes(config.generator);
  write_dataset(config.out, ds);
  const auto counts = ds.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    out << ds.class_names[c] << ' ' << counts[c] << '\n';
  }
  out << "wrote " << ds.size() << " images to " << config.out.string() << '\n';
  return kExitOk;
}

int cmd_run(const ExperimentConfig& config, int baseline_degree, std::ostream& out) {
  config.validate();
  const auto [train, test] = prepare_data(config);
  const RunResult result = run_point(config, train, test, resolve_threads(config.jobs));

  create_dir(config.out);
  {
    auto csv = open_out(config.out / "results.csv");
    write_results_header(csv, false);
    write_result_row(csv, result, false, config.timing);
  }
  save_model(config.out / "model.mnlm", result.model);
  {
    ExperimentConfig resolved = config;
    resolved.net.threshold = result.threshold;
    resolved.auto_threshold = false;
    auto cfg = open_out(config.out / "config.txt");
    write_config(cfg, resolved);
  }
  std::vector<RunResult> timed{result};
  if (baseline_degree >= 0) {
    const RunResult base =
        run_moment_baseline(config, train, test, baseline_degree, resolve_threads(config.jobs));
    auto csv = open_out(config.out / "baseline.csv");
    write_results_header(csv, false);
    write_result_row(csv, base, false, config.timing);
    print_result(out, "baseline", base);
    timed.push_back(base);
  }
  {
    auto csv = open_out(config.out / "timings.csv");
    write_timings(csv, timed);
  }
  print_result(out, "run", result);
  return kExitOk;
}

int cmd_sweep(ExperimentConfig config, const std::vector<std::string>& axes, std::ostream& out) {
  for (const auto& a : axes) config.axes.push_back(parse_axis(a));
  if (config.axes.empty()) return cmd_run(config, -1, out);
  config.validate();
  const auto [train, test] = prepare_data(config);
  const auto results = run_sweep(config, train, test);
  create_dir(config.out);
  {
    auto csv = open_out(config.out / "sweep.csv");
    write_results_header(csv, true);
    for (const auto& r : results) write_result_row(csv, r, true, config.timing);
  }
  {
    auto csv = open_out(config.out / "timings.csv");
    write_timings(csv, results);
  }
  for (const auto& r : results) print_result(out, "point", r);
  return kExitOk;
}

int cmd_selfcheck(double perturbation, std::ostream& out) {
  SelfCheckOptions options;
  options.norm_perturbation = perturbation;
  bool ok = true;
  for (const auto& check : run_selfcheck(options)) {
    out << std::left << std::setw(28) << check.name << " max_dev=" << std::scientific
        << std::setprecision(3) << check.max_deviation << " tol=" << check.tolerance << ' '
        << (check.passed() ? "PASS" : "FAIL") << std::defaultfloat << '\n';
    ok = ok && check.passed();
  }
  out << (ok ? "selfcheck passed" : "selfcheck FAILED") << '\n';
  return ok ? kExitOk : kExitSelfcheck;
}

int cmd_export_bank(const ExperimentConfig& config, const std::string& file, std::ostream& out) {
  const NetConfig net = config.resolved_net();
  net.validate();
  const NetBanks banks = build_net_banks(net);
  if (file.empty() || file == "-") {
    write_bank_text(out, banks.first);
  } else {
    auto f = open_out(file);
    write_bank_text(f, banks.first);
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moment-kernel feature networks for binary shape recognition", "momentsnet"};
  app.require_subcommand(1);
  // --h is the block size, so help is long-form only (inherited by subcommands).
  app.set_help_flag("--help", "print this help and exit");

  const std::vector<std::string_view> experiment_keys = parameter_names();
  const std::vector<std::string_view> generate_keys = {"out", "classes", "rotations", "replicas",
                                                       "size", "shape-seed"};
  const std::vector<std::string_view> bank_keys = {
      "family", "l1", "k", "k1", "k2", "reduction", "krawtchouk-p1", "krawtchouk-p2",
      "hahn-a", "hahn-c", "gpht-s"};

  Values gen_values, run_values, sweep_values, bank_values;

  auto* generate = app.add_subcommand("generate", "write the synthetic rotated-shape dataset");
  add_parameters(generate, gen_values, generate_keys);
  std::string gen_seed;
  generate->add_option("--seed", gen_seed, "generator seed (same as --shape-seed)");
  std::string gen_config;
  generate->add_option("--config", gen_config, kConfigHelp);

  auto* run_cmd = app.add_subcommand("run", "train and evaluate one configuration");
  add_parameters(run_cmd, run_values, experiment_keys);
  int baseline_degree = -1;
  run_cmd->add_option("--baseline-degree", baseline_degree,
                      "also evaluate whole-image moments up to this degree (baseline.csv)");
  std::string run_config;
  run_cmd->add_option("--config", run_config, kConfigHelp);

  auto* sweep = app.add_subcommand("sweep", "evaluate the cross product of up to 3 axes");
  add_parameters(sweep, sweep_values, experiment_keys);
  std::vector<std::string> axes;
  sweep->add_option("--axis", axes, "name=v1,v2,... or name=lo:hi:step (repeatable)");
  std::string sweep_config;
  sweep->add_option("--config", sweep_config, kConfigHelp);

  auto* selfcheck = app.add_subcommand("selfcheck", "run the kernel property checks");
  double perturbation = 1.0;
  selfcheck->add_option("--perturb-norm", perturbation)->group("");

  auto* export_bank = app.add_subcommand("export-bank", "print first-stage filters as text");
  add_parameters(export_bank, bank_values, bank_keys);
  std::string bank_file;
  export_bank->add_option("--file", bank_file, "output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
    if (generate->parsed()) {
      auto config = collect(generate, gen_values, generate_keys, gen_config);
      if (generate->count("--seed")) set_parameter(config, "shape-seed", gen_seed);
      return cmd_generate(config, out);
    }
    if (run_cmd->parsed()) {
      return cmd_run(collect(run_cmd, run_values, experiment_keys, run_config), baseline_degree,
                     out);
    }
    if (sweep->parsed()) {
      return cmd_sweep(collect(sweep, sweep_values, experiment_keys, sweep_config), axes, out);
    }
    if (selfcheck->parsed()) return cmd_selfcheck(perturbation, out);
    if (export_bank->parsed()) {
      return cmd_export_bank(collect(export_bank, bank_values, bank_keys, ""), bank_file, out);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace momentsnet::cli
