// frdd: fractional reaction-diffusion depth restoration tool.
//
// Subcommands: restore (denoise a depth file), synth (generate a ground
// truth / degraded pair), eval (metrics between two depth files), sweep
// (benchmark a list of fractional orders plus the adaptive schedule).
// Every subcommand accepts --config FILE with key=value lines mirroring
// the long option names; command-line flags override config-file keys,
// which override built-in defaults. Unknown config keys are errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "frdd/frdd.hpp"

namespace {

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("invalid ") + what + " value '" + s + "'");
  }
}

std::vector<double> parse_double_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, what));
  if (out.empty())
    throw std::invalid_argument(std::string("empty ") + what + " list");
  return out;
}

frdd::AlphaSchedule parse_alpha(const std::string& s) {
  if (s == "adaptive") return frdd::AlphaSchedule::adaptive_rule();
  if (s.find(',') != std::string::npos)
    return frdd::AlphaSchedule::per_iteration(parse_double_list(s, "alpha"));
  return frdd::AlphaSchedule::fixed(parse_double(s, "alpha"));
}

frdd::Conductance parse_conductance(const std::string& s) {
  if (s == "exp") return frdd::Conductance::exponential;
  if (s == "rational") return frdd::Conductance::rational;
  if (s == "const") return frdd::Conductance::constant;
  throw std::invalid_argument("invalid conductance '" + s +
                              "' (expected exp, rational, or const)");
}

frdd::InitBuilderKind parse_init(const std::string& s) {
  if (s == "identity") return frdd::InitBuilderKind::identity;
  if (s == "median") return frdd::InitBuilderKind::median;
  if (s == "gaussian") return frdd::InitBuilderKind::gaussian;
  if (s == "bilateral") return frdd::InitBuilderKind::bilateral;
  throw std::invalid_argument("invalid init builder '" + s +
                              "' (expected identity, median, gaussian, or bilateral)");
}

frdd::SceneKind parse_scene(const std::string& s) {
  if (s == "plane") return frdd::SceneKind::plane;
  if (s == "step") return frdd::SceneKind::step;
  if (s == "slope") return frdd::SceneKind::slope;
  if (s == "spheres") return frdd::SceneKind::spheres;
  if (s == "stairs") return frdd::SceneKind::stairs;
  throw std::invalid_argument("invalid scene '" + s +
                              "' (expected plane, step, slope, spheres, or stairs)");
}

// Raw flag values for everything that configures a restoration run; kept
// as strings where the flag grammar is richer than a number.
struct RestorationFlags {
  std::string alpha = "0.5";
  int iterations = 6;
  double lambda = 0.01;
  double tau = 0.25;
  std::string conductance = "rational";
  std::string kappa = "30";
  std::string init = "identity";
  int init_radius = 1;
  double init_sigma = 1.0;
  double init_sigma_spatial = 2.0;
  double init_sigma_range = 30.0;
  std::string smooth = "none";
  int history_window = 0;
  std::string nan_policy = "error";
  bool history_window_set = false;
};

void add_restoration_flags(CLI::App* cmd, RestorationFlags& f, bool include_alpha) {
  if (include_alpha)
    cmd->add_option("--alpha", f.alpha,
                    "Fractional order: a constant in (0,1], a comma list (one per "
                    "iteration), or 'adaptive'")
        ->capture_default_str();
  cmd->add_option("--iterations", f.iterations, "Number of refinement iterations")
      ->capture_default_str();
  cmd->add_option("--lambda", f.lambda, "Reaction (data fidelity) weight")
      ->capture_default_str();
  cmd->add_option("--tau", f.tau, "Explicit step scale in (0,1]; 1 = unscaled scheme")
      ->capture_default_str();
  cmd->add_option("--conductance", f.conductance, "Edge-stopping function: exp, rational, or const")
      ->capture_default_str();
  cmd->add_option("--kappa", f.kappa, "Conductance contrast scale in mm, or 'auto'")
      ->capture_default_str();
  cmd->add_option("--init", f.init,
                  "Initial-state builder: identity, median, gaussian, or bilateral")
      ->capture_default_str();
  cmd->add_option("--init-radius", f.init_radius, "Median builder radius")
      ->capture_default_str();
  cmd->add_option("--init-sigma", f.init_sigma, "Gaussian builder sigma (pixels)")
      ->capture_default_str();
  cmd->add_option("--init-sigma-spatial", f.init_sigma_spatial,
                  "Bilateral builder spatial sigma (pixels)")
      ->capture_default_str();
  cmd->add_option("--init-sigma-range", f.init_sigma_range,
                  "Bilateral builder range sigma (mm)")
      ->capture_default_str();
  cmd->add_option("--smooth", f.smooth,
                  "Kernel applied to the diffusion term: none, box3, or tent3")
      ->capture_default_str();
  cmd->add_option("--history-window", f.history_window,
                  "Keep only the most recent N update differences in the memory term");
  cmd->add_option("--nan-policy", f.nan_policy,
                  "On non-finite values: 'error' aborts, 'clamp' stops and keeps the "
                  "last finite state")
      ->capture_default_str();
}

// Called after the config file is folded in, so a windowed memory request
// is honored from either source.
void finish_restoration_flags(CLI::App* cmd, RestorationFlags& f) {
  f.history_window_set = cmd->count("--history-window") > 0;
}

frdd::RestorationConfig build_config(const RestorationFlags& f) {
  frdd::RestorationConfig config;
  config.alpha = parse_alpha(f.alpha);
  config.iterations = f.iterations;
  config.lambda = f.lambda;
  config.tau = f.tau;
  config.conductance.variant = parse_conductance(f.conductance);
  if (f.kappa == "auto") {
    config.conductance.auto_kappa = true;
  } else {
    config.conductance.kappa = parse_double(f.kappa, "kappa");
  }
  config.init.kind = parse_init(f.init);
  config.init.radius = f.init_radius;
  config.init.sigma = f.init_sigma;
  config.init.sigma_spatial = f.init_sigma_spatial;
  config.init.sigma_range = f.init_sigma_range;
  if (f.smooth == "box3") {
    config.smoothing_kernel = frdd::kernels::box_mean3();
  } else if (f.smooth == "tent3") {
    config.smoothing_kernel = frdd::kernels::tent3();
  } else if (f.smooth != "none") {
    throw std::invalid_argument("invalid smooth kernel '" + f.smooth +
                                "' (expected none, box3, or tent3)");
  }
  if (f.history_window_set) config.history_window = f.history_window;
  if (f.nan_policy == "error") {
    config.nan_policy = frdd::NanPolicy::error;
  } else if (f.nan_policy == "clamp") {
    config.nan_policy = frdd::NanPolicy::clamp_and_stop;
  } else {
    throw std::invalid_argument("invalid nan policy '" + f.nan_policy +
                                "' (expected error or clamp)");
  }
  config.validate();
  return config;
}

struct SceneFlags {
  std::string scene = "plane";
  int width = 64;
  int height = 64;
  double depth_min = 500.0;
  double depth_max = 1500.0;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;
  double attenuation = 1.0;
  double blur_sigma = 0.0;
  double bias = 0.0;
};

void add_scene_flags(CLI::App* cmd, SceneFlags& f) {
  cmd->add_option("--scene", f.scene, "Scene kind: plane, step, slope, spheres, stairs")
      ->capture_default_str();
  cmd->add_option("--width", f.width, "Scene width in pixels")->capture_default_str();
  cmd->add_option("--height", f.height, "Scene height in pixels")->capture_default_str();
  cmd->add_option("--depth-min", f.depth_min, "Closest scene depth (mm)")
      ->capture_default_str();
  cmd->add_option("--depth-max", f.depth_max, "Farthest scene depth (mm)")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed for scene synthesis and degradation noise")
      ->capture_default_str();
  cmd->add_option("--noise-sigma", f.noise_sigma, "Depth noise sigma (mm)")
      ->capture_default_str();
  cmd->add_option("--attenuation", f.attenuation,
                  "Signal attenuation in (0,1]; noise scales by 1/sqrt of it")
      ->capture_default_str();
  cmd->add_option("--blur-sigma", f.blur_sigma, "Scattering blur sigma (pixels)")
      ->capture_default_str();
  cmd->add_option("--bias", f.bias, "Constant depth bias (mm)")->capture_default_str();
}

frdd::SceneSpec build_scene_spec(const SceneFlags& f) {
  frdd::SceneSpec spec;
  spec.kind = parse_scene(f.scene);
  spec.width = f.width;
  spec.height = f.height;
  spec.depth_min = f.depth_min;
  spec.depth_max = f.depth_max;
  spec.seed = f.seed;
  frdd::validate(spec);
  return spec;
}

frdd::DegradationSpec build_degradation_spec(const SceneFlags& f) {
  frdd::DegradationSpec spec;
  spec.noise_sigma = f.noise_sigma;
  spec.attenuation = f.attenuation;
  spec.blur_sigma = f.blur_sigma;
  spec.bias = f.bias;
  spec.seed = f.seed;
  frdd::validate(spec);
  return spec;
}

void enable_config_file(CLI::App* cmd, std::string& path_slot) {
  cmd->add_option("--config", path_slot, "Read options from a key=value file");
}

std::string trimmed(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// CLI11 processes set_config only on the app that owns the whole parse,
// not on subcommands, so the file is applied by hand after parsing: every
// key must name a long option of the subcommand, and an option already
// given on the command line keeps its value.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string entry = trimmed(line);
    if (entry.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) throw CLI::ConfigError(where + ": expected key=value");
    const std::string key = trimmed(entry.substr(0, eq));
    const std::string value = trimmed(entry.substr(eq + 1));
    if (key.empty() || value.empty())
      throw CLI::ConfigError(where + ": expected key=value");
    CLI::Option* opt =
        key == "config" ? nullptr : cmd->get_option_no_throw("--" + key);
    if (opt == nullptr) throw CLI::ConfigError(where + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

int cmd_restore(const std::string& input, const std::string& output,
                const RestorationFlags& flags) {
  const frdd::RestorationConfig config = build_config(flags);
  frdd::DepthFormat format = frdd::DepthFormat::pfm;
  const frdd::DepthField raw = frdd::read_depth(input, &format);
  const frdd::RestorationResult result = frdd::run_restoration(raw, config);
  frdd::write_depth(output, result.restored, format);
  const std::size_t executed = result.trace.records.size();
  const double final_update =
      executed == 0 ? 0.0 : result.trace.records.back().max_abs_update;
  std::cout << "restored: " << executed << " iterations, final max update "
            << frdd::format_csv_number(final_update) << " mm\n";
  return 0;
}

int cmd_synth(const std::string& gt_path, const std::string& raw_path,
              const SceneFlags& flags) {
  const frdd::SceneSpec scene = build_scene_spec(flags);
  const frdd::DegradationSpec degradation = build_degradation_spec(flags);
  const frdd::DepthField gt = frdd::generate_scene(scene);
  const frdd::DepthField raw = frdd::degrade(gt, degradation);
  frdd::write_depth(gt_path, gt);
  frdd::write_depth(raw_path, raw);
  return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& gt_path,
             const std::string& thresholds_text, const std::string& out_path) {
  const std::vector<double> thresholds = parse_double_list(thresholds_text, "threshold");
  const frdd::DepthField pred = frdd::read_depth(pred_path);
  const frdd::DepthField gt = frdd::read_depth(gt_path);
  const frdd::Metrics metrics = frdd::compute_metrics(pred, gt, thresholds);

  std::ostringstream csv;
  csv << "mae,rmse";
  for (double th : thresholds) csv << ',' << frdd::rho_column_name(th);
  csv << '\n' << frdd::format_csv_number(metrics.mae) << ','
      << frdd::format_csv_number(metrics.rmse);
  for (double th : thresholds) csv << ',' << frdd::format_csv_number(metrics.rho.at(th));
  csv << '\n';

  std::cout << csv.str();
  if (!out_path.empty()) {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + out_path + " for writing");
    os << csv.str();
    if (!os) throw std::runtime_error("failed writing " + out_path);
  }
  return 0;
}

int cmd_sweep(const std::string& out_csv, const std::string& alphas_text,
              const SceneFlags& scene_flags, const RestorationFlags& flags) {
  const std::vector<double> alphas = parse_double_list(alphas_text, "alpha");
  for (double a : alphas)
    if (!(a > 0.0) || a > 1.0)
      throw std::invalid_argument("sweep alpha values must be in (0, 1]");

  const frdd::SceneSpec scene = build_scene_spec(scene_flags);
  const frdd::DegradationSpec degradation = build_degradation_spec(scene_flags);
  const frdd::RestorationConfig base = build_config(flags);

  std::vector<frdd::RestorationConfig> configs;
  configs.reserve(alphas.size() + 1);
  for (double a : alphas) {
    frdd::RestorationConfig c = base;
    c.alpha = frdd::AlphaSchedule::fixed(a);
    configs.push_back(std::move(c));
  }
  frdd::RestorationConfig adaptive = base;
  adaptive.alpha = frdd::AlphaSchedule::adaptive_rule();
  configs.push_back(std::move(adaptive));

  const std::vector<frdd::BenchmarkRow> rows = frdd::run_benchmark(
      std::span(&scene, 1), std::span(&degradation, 1), configs);

  std::ofstream os(out_csv, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + out_csv + " for writing");
  os << "alpha,mae,rmse";
  for (double th : frdd::kDefaultRhoThresholds) os << ',' << frdd::rho_column_name(th);
  os << '\n';
  for (const frdd::BenchmarkRow& row : rows) {
    os << frdd::alpha_label(row.config.alpha) << ','
       << frdd::format_csv_number(row.restored.mae) << ','
       << frdd::format_csv_number(row.restored.rmse);
    for (double th : frdd::kDefaultRhoThresholds)
      os << ',' << frdd::format_csv_number(row.restored.rho.at(th));
    os << '\n';
  }
  if (!os) throw std::runtime_error("failed writing " + out_csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth restoration by memory-weighted reaction-diffusion"};
  app.require_subcommand(1);

  std::string restore_input, restore_output, restore_config;
  RestorationFlags restore_flags;
  CLI::App* restore = app.add_subcommand("restore", "Restore a depth image file");
  restore->add_option("input", restore_input, "Input depth file (PFM or 16-bit PGM)")
      ->required();
  restore->add_option("output", restore_output, "Output depth file (input format)")
      ->required();
  add_restoration_flags(restore, restore_flags, true);
  enable_config_file(restore, restore_config);

  std::string synth_gt, synth_raw, synth_config;
  SceneFlags synth_flags;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate a synthetic ground truth / raw pair");
  synth->add_option("gt", synth_gt, "Ground-truth output path")->required();
  synth->add_option("raw", synth_raw, "Degraded output path")->required();
  add_scene_flags(synth, synth_flags);
  enable_config_file(synth, synth_config);

  std::string eval_pred, eval_gt, eval_out, eval_config;
  std::string eval_thresholds = "1.02,1.05,1.10";
  CLI::App* eval = app.add_subcommand("eval", "Metrics between two depth files");
  eval->add_option("pred", eval_pred, "Predicted / restored depth file")->required();
  eval->add_option("gt", eval_gt, "Ground-truth depth file")->required();
  eval->add_option("--thresholds", eval_thresholds, "Comma list of ratio thresholds")
      ->capture_default_str();
  eval->add_option("--out", eval_out, "Also write the CSV to this path");
  enable_config_file(eval, eval_config);

  std::string sweep_out, sweep_config;
  std::string sweep_alphas = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  SceneFlags sweep_scene_flags;
  RestorationFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Benchmark fixed fractional orders plus the adaptive schedule");
  sweep->add_option("out", sweep_out, "Output CSV path")->required();
  sweep->add_option("--alphas", sweep_alphas, "Comma list of fixed orders to sweep")
      ->capture_default_str();
  add_scene_flags(sweep, sweep_scene_flags);
  add_restoration_flags(sweep, sweep_flags, false);
  enable_config_file(sweep, sweep_config);

  try {
    app.parse(argc, argv);
    if (restore->parsed()) {
      apply_config_file(restore, restore_config);
      finish_restoration_flags(restore, restore_flags);
      return cmd_restore(restore_input, restore_output, restore_flags);
    }
    if (synth->parsed()) {
      apply_config_file(synth, synth_config);
      return cmd_synth(synth_gt, synth_raw, synth_flags);
    }
    if (eval->parsed()) {
      apply_config_file(eval, eval_config);
      return cmd_eval(eval_pred, eval_gt, eval_thresholds, eval_out);
    }
    if (sweep->parsed()) {
      apply_config_file(sweep, sweep_config);
      finish_restoration_flags(sweep, sweep_flags);
      return cmd_sweep(sweep_out, sweep_alphas, sweep_scene_flags, sweep_flags);
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "frdd: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "frdd: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
