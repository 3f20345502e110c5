#pragma once

#include <charconv>
#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "frdd/metrics.hpp"
#include "frdd/pipeline.hpp"
#include "frdd/synth.hpp"

namespace frdd {

/// Locale-independent number formatting for CSV output: 6 significant
/// digits, '.' decimal separator, printf %g style.
inline std::string format_csv_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

inline const char* scene_kind_name(SceneKind kind) {
  switch (kind) {
    case SceneKind::plane: return "plane";
    case SceneKind::step: return "step";
    case SceneKind::slope: return "slope";
    case SceneKind::spheres: return "spheres";
    case SceneKind::stairs: return "stairs";
  }
  return "unknown";
}

inline const char* conductance_name(Conductance variant) {
  switch (variant) {
    case Conductance::exponential: return "exp";
    case Conductance::rational: return "rational";
    case Conductance::constant: return "const";
  }
  return "unknown";
}

inline const char* init_builder_name(InitBuilderKind kind) {
  switch (kind) {
    case InitBuilderKind::identity: return "identity";
    case InitBuilderKind::median: return "median";
    case InitBuilderKind::gaussian: return "gaussian";
    case InitBuilderKind::bilateral: return "bilateral";
  }
  return "unknown";
}

/// Schedule label for one-column CSV output: the constant value,
/// "adaptive", or a ';'-joined list.
inline std::string alpha_label(const AlphaSchedule& schedule) {
  switch (schedule.kind) {
    case AlphaSchedule::Kind::constant:
      return format_csv_number(schedule.value);
    case AlphaSchedule::Kind::adaptive:
      return "adaptive";
    case AlphaSchedule::Kind::list: {
      std::string out;
      for (std::size_t i = 0; i < schedule.values.size(); ++i) {
        if (i) out += ';';
        out += format_csv_number(schedule.values[i]);
      }
      return out;
    }
  }
  return "unknown";
}

/// Threshold column label: at least two decimals so the default triple
/// reads rho_1.02, rho_1.05, rho_1.10.
inline std::string rho_column_name(double threshold) {
  std::string s = format_csv_number(threshold);
  const auto dot = s.find('.');
  if (dot == std::string::npos)
    s += ".00";
  else if (s.size() - dot - 1 < 2)
    s += "0";
  return "rho_" + s;
}

struct BenchmarkRow {
  SceneSpec scene;
  DegradationSpec degradation;
  RestorationConfig config;
  Metrics raw;
  Metrics restored;
};

/// Cartesian product of scenes x degradations x configs. Each cell
/// synthesizes the ground truth, degrades it, restores it, and records
/// metrics of the raw and restored fields against the ground truth.
inline std::vector<BenchmarkRow> run_benchmark(std::span<const SceneSpec> scenes,
                                               std::span<const DegradationSpec> degradations,
                                               std::span<const RestorationConfig> configs) {
  if (scenes.empty() || degradations.empty() || configs.empty())
    throw std::invalid_argument("run_benchmark: spec lists must be non-empty");
  std::vector<BenchmarkRow> rows;
  rows.reserve(scenes.size() * degradations.size() * configs.size());
  for (const SceneSpec& scene : scenes) {
    const DepthField gt = generate_scene(scene);
    for (const DegradationSpec& deg : degradations) {
      const DepthField raw = degrade(gt, deg);
      const Metrics raw_metrics = compute_metrics(raw, gt);
      for (const RestorationConfig& config : configs) {
        const RestorationResult result = run_restoration(raw, config);
        BenchmarkRow row{scene, deg, config, raw_metrics,
                         compute_metrics(result.restored, gt)};
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

/// Flat CSV: every spec parameter as a column, then raw and restored
/// metrics. '.' decimals, ',' delimiter, LF line endings.
inline void write_benchmark_csv(std::ostream& os, std::span<const BenchmarkRow> rows) {
  os << "scene,width,height,depth_min,depth_max,scene_seed,"
        "noise_sigma,attenuation,blur_sigma,bias,noise_seed,"
        "alpha,iterations,lambda,tau,conductance,kappa,init,raw_mae,raw_rmse";
  for (double th : kDefaultRhoThresholds) os << ",raw_" << rho_column_name(th);
  os << ",restored_mae,restored_rmse";
  for (double th : kDefaultRhoThresholds) os << ",restored_" << rho_column_name(th);
  os << '\n';
  for (const BenchmarkRow& row : rows) {
    os << scene_kind_name(row.scene.kind) << ',' << row.scene.width << ','
       << row.scene.height << ',' << format_csv_number(row.scene.depth_min) << ','
       << format_csv_number(row.scene.depth_max) << ',' << row.scene.seed << ','
       << format_csv_number(row.degradation.noise_sigma) << ','
       << format_csv_number(row.degradation.attenuation) << ','
       << format_csv_number(row.degradation.blur_sigma) << ','
       << format_csv_number(row.degradation.bias) << ',' << row.degradation.seed << ','
       << alpha_label(row.config.alpha) << ',' << row.config.iterations << ','
       << format_csv_number(row.config.lambda) << ','
       << format_csv_number(row.config.tau) << ','
       << conductance_name(row.config.conductance.variant) << ','
       << (row.config.conductance.auto_kappa
               ? std::string("auto")
               : format_csv_number(row.config.conductance.kappa))
       << ',' << init_builder_name(row.config.init.kind) << ','
       << format_csv_number(row.raw.mae) << ',' << format_csv_number(row.raw.rmse);
    for (double th : kDefaultRhoThresholds)
      os << ',' << format_csv_number(row.raw.rho.at(th));
    os << ',' << format_csv_number(row.restored.mae) << ','
       << format_csv_number(row.restored.rmse);
    for (double th : kDefaultRhoThresholds)
      os << ',' << format_csv_number(row.restored.rho.at(th));
    os << '\n';
  }
}

}  // namespace frdd
