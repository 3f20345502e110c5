#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "frdd/caputo.hpp"
#include "frdd/contconv.hpp"
#include "frdd/diffusion.hpp"
#include "frdd/field.hpp"
#include "frdd/filters.hpp"
#include "frdd/metrics.hpp"

namespace frdd {

enum class InitBuilderKind { identity, median, gaussian, bilateral };

/// Initial-state builder: the slot a learned generator would occupy.
/// Classical substitutes only; `identity` passes the raw measurement
/// through untouched.
struct InitBuilder {
  InitBuilderKind kind = InitBuilderKind::identity;
  int radius = 1;             // median
  double sigma = 1.0;         // gaussian
  double sigma_spatial = 2.0; // bilateral
  double sigma_range = 30.0;  // bilateral, millimeters
};

/// Constants of the adaptive order rule
///
///   alpha = clamp(alpha_base * (1 + gain * tanh(prev_update_norm / update_scale)),
///                 0.05, 1.0)
///
/// update_scale <= 0 means auto: resolved at run start to 1% of the
/// initial state's dynamic range. A zero scale (constant input) or zero
/// update norm contributes nothing, so the rule then returns alpha_base.
struct AdaptiveAlpha {
  double alpha_base = 0.5;
  double gain = 0.5;
  double update_scale = 0.0;
};

struct AlphaSchedule {
  enum class Kind { constant, list, adaptive };
  Kind kind = Kind::constant;
  double value = 0.5;
  std::vector<double> values;
  AdaptiveAlpha adaptive;

  static AlphaSchedule fixed(double alpha) {
    AlphaSchedule s;
    s.kind = Kind::constant;
    s.value = alpha;
    return s;
  }
  static AlphaSchedule per_iteration(std::vector<double> alphas) {
    AlphaSchedule s;
    s.kind = Kind::list;
    s.values = std::move(alphas);
    return s;
  }
  static AlphaSchedule adaptive_rule(AdaptiveAlpha params = {}) {
    AlphaSchedule s;
    s.kind = Kind::adaptive;
    s.adaptive = params;
    return s;
  }
};

enum class NanPolicy { error, clamp_and_stop };

struct RestorationConfig {
  int iterations = 6;
  AlphaSchedule alpha;
  double lambda = 0.01;
  double tau = 0.25;
  ConductanceSpec conductance;
  InitBuilder init;
  std::optional<DiracKernel> smoothing_kernel;
  std::optional<int> history_window;
  NanPolicy nan_policy = NanPolicy::error;

  void validate() const {
    if (iterations < 1)
      throw std::invalid_argument("RestorationConfig: iterations must be >= 1");
    if (!(lambda >= 0.0))
      throw std::invalid_argument("RestorationConfig: lambda must be >= 0");
    if (!(tau > 0.0) || tau > 1.0)
      throw std::invalid_argument("RestorationConfig: tau must be in (0, 1]");
    switch (alpha.kind) {
      case AlphaSchedule::Kind::constant:
        if (!(alpha.value > 0.0) || alpha.value > 1.0)
          throw std::invalid_argument("RestorationConfig: alpha must be in (0, 1]");
        break;
      case AlphaSchedule::Kind::list:
        if (static_cast<int>(alpha.values.size()) < iterations)
          throw std::invalid_argument(
              "RestorationConfig: alpha list shorter than iterations");
        for (double a : alpha.values)
          if (!(a > 0.0) || a > 1.0)
            throw std::invalid_argument(
                "RestorationConfig: every scheduled alpha must be in (0, 1]");
        break;
      case AlphaSchedule::Kind::adaptive:
        if (!(alpha.adaptive.alpha_base > 0.0) || alpha.adaptive.alpha_base > 1.0)
          throw std::invalid_argument(
              "RestorationConfig: adaptive alpha_base must be in (0, 1]");
        if (!std::isfinite(alpha.adaptive.gain) || alpha.adaptive.gain < 0.0)
          throw std::invalid_argument("RestorationConfig: adaptive gain must be >= 0");
        if (!std::isfinite(alpha.adaptive.update_scale))
          throw std::invalid_argument(
              "RestorationConfig: adaptive update_scale must be finite");
        break;
    }
    if (!conductance.auto_kappa && !(conductance.kappa > 0.0))
      throw std::invalid_argument("RestorationConfig: kappa must be positive");
    switch (init.kind) {
      case InitBuilderKind::identity:
        break;
      case InitBuilderKind::median:
        if (init.radius < 1)
          throw std::invalid_argument("RestorationConfig: median radius must be >= 1");
        break;
      case InitBuilderKind::gaussian:
        if (init.sigma < 0.0)
          throw std::invalid_argument("RestorationConfig: gaussian sigma must be >= 0");
        break;
      case InitBuilderKind::bilateral:
        if (init.sigma_spatial < 0.0)
          throw std::invalid_argument(
              "RestorationConfig: bilateral sigma_spatial must be >= 0");
        if (!(init.sigma_range > 0.0))
          throw std::invalid_argument(
              "RestorationConfig: bilateral sigma_range must be > 0");
        break;
    }
    if (history_window && *history_window < 1)
      throw std::invalid_argument("RestorationConfig: history_window must be >= 1");
  }
};

struct IterationRecord {
  double alpha = 0.0;
  double max_abs_update = 0.0;
  double mean = 0.0;
  std::optional<Metrics> metrics;
};

struct RestorationTrace {
  std::vector<IterationRecord> records;
};

struct RestorationResult {
  DepthField restored;
  RestorationTrace trace;
};

inline DepthField build_initial_state(const DepthField& raw, const InitBuilder& builder) {
  switch (builder.kind) {
    case InitBuilderKind::identity:
      return raw;
    case InitBuilderKind::median:
      return median_filter(raw, builder.radius);
    case InitBuilderKind::gaussian:
      return gaussian_filter(raw, builder.sigma);
    case InitBuilderKind::bilateral:
      return bilateral_filter(raw, builder.sigma_spatial, builder.sigma_range);
  }
  throw std::invalid_argument("build_initial_state: unknown builder kind");
}

/// Order to use at iteration `iter`, given the previous iteration's
/// max-abs update (0 before the first iteration). For the adaptive rule
/// the config's update_scale must already be resolved; run_restoration
/// resolves an auto scale from its initial state before stepping.
inline double alpha_for_iteration(const RestorationConfig& config, int iter,
                                  double prev_update_norm) {
  if (iter < 0 || iter >= config.iterations)
    throw std::invalid_argument("alpha_for_iteration: iteration out of range");
  switch (config.alpha.kind) {
    case AlphaSchedule::Kind::constant:
      return config.alpha.value;
    case AlphaSchedule::Kind::list:
      if (static_cast<std::size_t>(iter) >= config.alpha.values.size())
        throw std::invalid_argument("alpha_for_iteration: alpha list shorter than iterations");
      return config.alpha.values[static_cast<std::size_t>(iter)];
    case AlphaSchedule::Kind::adaptive: {
      const AdaptiveAlpha& p = config.alpha.adaptive;
      double t = 0.0;
      if (prev_update_norm > 0.0 && p.update_scale > 0.0)
        t = std::tanh(prev_update_norm / p.update_scale);
      return std::clamp(p.alpha_base * (1.0 + p.gain * t), 0.05, 1.0);
    }
  }
  throw std::invalid_argument("alpha_for_iteration: unknown schedule kind");
}

/// Full restoration run. Builds u_0, then per iteration evaluates the
/// divergence term (optionally smoothed by the configured Dirac kernel),
/// the reaction term anchored at u_0, and one fractional step whose memory
/// sum spans the stored update history (truncated to history_window when
/// set). Per-iteration metrics are recorded when a ground truth is given.
///
/// nan_policy::error turns any non-finite intermediate into a
/// numeric_error naming the iteration; nan_policy::clamp_and_stop stops
/// stepping and returns the last finite state with a truncated trace.
inline RestorationResult run_restoration(const DepthField& raw,
                                         const RestorationConfig& config,
                                         const DepthField* gt = nullptr) {
  config.validate();
  if (gt != nullptr && !gt->same_shape(raw))
    throw std::invalid_argument("run_restoration: ground truth shape mismatch");

  const DepthField u0 = build_initial_state(raw, config.init);
  RestorationConfig resolved = config;
  if (resolved.alpha.kind == AlphaSchedule::Kind::adaptive &&
      resolved.alpha.adaptive.update_scale <= 0.0)
    resolved.alpha.adaptive.update_scale = u0.dynamic_range() * 0.01;

  DepthField u = u0;
  std::vector<DepthField> history;
  RestorationTrace trace;
  trace.records.reserve(static_cast<std::size_t>(config.iterations));
  double prev_norm = 0.0;

  for (int iter = 0; iter < config.iterations; ++iter) {
    const double alpha = alpha_for_iteration(resolved, iter, prev_norm);
    DepthField u_next = u;
    try {
      DepthField div = diffusion_term(u, config.conductance);
      if (config.smoothing_kernel)
        div = continuous_convolve(div, *config.smoothing_kernel);
      const DepthField react = reaction_term(u0, u, config.lambda);
      const FractionalState state(alpha, config.tau, history);
      u_next = fractional_step(u, div, react, state);
    } catch (const numeric_error& e) {
      if (config.nan_policy == NanPolicy::error)
        throw numeric_error("run_restoration: non-finite values at iteration " +
                            std::to_string(iter) + " (" + e.what() + ")");
      break;
    }

    std::vector<double> diff(u.size());
    double max_update = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i) {
      diff[i] = u_next[i] - u[i];
      max_update = std::max(max_update, std::abs(diff[i]));
    }
    history.emplace_back(u.width(), u.height(), std::move(diff));
    if (config.history_window &&
        static_cast<int>(history.size()) > *config.history_window)
      history.erase(history.begin(),
                    history.end() - *config.history_window);

    IterationRecord rec;
    rec.alpha = alpha;
    rec.max_abs_update = max_update;
    rec.mean = u_next.mean();
    if (gt != nullptr) rec.metrics = compute_metrics(u_next, *gt);
    trace.records.push_back(std::move(rec));

    u = std::move(u_next);
    prev_norm = max_update;
  }

  if (raw.has_mask()) {
    std::vector<double> vals(u.data().begin(), u.data().end());
    u = detail::rewrap_with_mask(raw, u.width(), u.height(), std::move(vals));
  }
  return {std::move(u), std::move(trace)};
}

}  // namespace frdd
