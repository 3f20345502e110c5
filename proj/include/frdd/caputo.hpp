#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "frdd/field.hpp"

namespace frdd {

/// Gamma function on the positive reals. Backed by std::tgamma, which meets
/// the 1e-12 relative accuracy this library needs on (0.5, 3]; only
/// arguments in (1, 2] arise from the fractional scheme.
inline double gamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("gamma: argument must be positive");
  return std::tgamma(x);
}

/// L1 weights a_k = (k+1)^(1-alpha) - k^(1-alpha), k = 0..n.
///
/// a_0 is exactly 1 for every order. For alpha = 1 all later weights vanish
/// and the scheme degenerates to the integer-order update. The weights
/// telescope: sum(a_0..a_n) = (n+1)^(1-alpha).
inline std::vector<double> caputo_weights(double alpha, int n) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("caputo_weights: alpha must be in (0, 1]");
  if (n < 0) throw std::invalid_argument("caputo_weights: n must be >= 0");
  std::vector<double> w(static_cast<std::size_t>(n) + 1);
  w[0] = 1.0;
  const double e = 1.0 - alpha;
  for (int k = 1; k <= n; ++k)
    w[k] = std::pow(k + 1.0, e) - std::pow(static_cast<double>(k), e);
  return w;
}

/// State of the fractional time-stepping scheme: the order, its L1 weights,
/// the scale factor S = Gamma(2-alpha)/a_0^alpha, the step scale tau, and
/// the history of state differences u_{k+1} - u_k that feeds the memory
/// term. Immutable; build a fresh state per step (the order may change
/// between steps).
class FractionalState {
public:
  FractionalState(double alpha, double tau, std::vector<DepthField> diff_history = {})
      : alpha_(alpha), tau_(tau), diff_history_(std::move(diff_history)) {
    weights_ = caputo_weights(alpha_, static_cast<int>(diff_history_.size()));
    finish_init();
  }

  /// Explicit-weights constructor for callers that precompute one table
  /// covering a whole run. The table must satisfy the L1 invariants:
  /// a_0 = 1 exactly and non-increasing entries.
  FractionalState(double alpha, double tau, std::vector<double> weights,
                  std::vector<DepthField> diff_history)
      : alpha_(alpha),
        tau_(tau),
        weights_(std::move(weights)),
        diff_history_(std::move(diff_history)) {
    finish_init();
  }

  double alpha() const noexcept { return alpha_; }
  double tau() const noexcept { return tau_; }
  double s_factor() const noexcept { return s_factor_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<DepthField>& diff_history() const noexcept { return diff_history_; }

private:
  void finish_init() {
    if (!(alpha_ > 0.0) || alpha_ > 1.0)
      throw std::invalid_argument("FractionalState: alpha must be in (0, 1]");
    if (!(tau_ > 0.0) || tau_ > 1.0)
      throw std::invalid_argument("FractionalState: tau must be in (0, 1]");
    if (weights_.empty() || weights_[0] != 1.0)
      throw std::invalid_argument("FractionalState: weights must start at a_0 = 1");
    for (std::size_t k = 1; k < weights_.size(); ++k)
      if (!std::isfinite(weights_[k]) || weights_[k] > weights_[k - 1])
        throw std::invalid_argument("FractionalState: weights must be non-increasing");
    s_factor_ = gamma(2.0 - alpha_) / std::pow(weights_[0], alpha_);
    for (std::size_t k = 1; k < diff_history_.size(); ++k)
      if (!diff_history_[k].same_shape(diff_history_[0]))
        throw std::invalid_argument("FractionalState: history fields differ in shape");
  }

  double alpha_;
  double tau_;
  std::vector<double> weights_;
  double s_factor_ = 0.0;
  std::vector<DepthField> diff_history_;
};

/// Memory term of the L1 scheme: sum over k = 1..n of a_k * d[n-k], where
/// d[j] = u_{j+1} - u_j is the j-th stored difference and n is the history
/// length. Empty history gives the zero field of the given shape.
inline DepthField memory_correction(const FractionalState& state, int width, int height) {
  const auto& hist = state.diff_history();
  const auto& w = state.weights();
  const std::size_t n = hist.size();
  if (w.size() < n + 1)
    throw std::invalid_argument("memory_correction: weight array shorter than history");
  std::vector<double> acc(static_cast<std::size_t>(width) * height, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const DepthField& d = hist[n - k];
    if (d.width() != width || d.height() != height)
      throw std::invalid_argument("memory_correction: history shape mismatch");
    const double a = w[k];
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a * d[i];
  }
  return DepthField(width, height, std::move(acc));
}

inline DepthField memory_correction(const FractionalState& state) {
  if (state.diff_history().empty())
    throw std::invalid_argument("memory_correction: empty history needs an explicit shape");
  return memory_correction(state, state.diff_history()[0].width(),
                           state.diff_history()[0].height());
}

/// One step of the explicit fractional scheme:
///
///   u_{n+1} = u_n + tau * S * (div_term + react_term) - memory
///
/// tau = 1 reproduces the plain L1 update; the default 0.25 elsewhere in
/// this library keeps the explicit 4-neighbor scheme in its stable range.
/// The caller appends (u_{n+1} - u_n) to the history afterwards. Throws
/// numeric_error if the update leaves the finite range.
inline DepthField fractional_step(const DepthField& u_n, const DepthField& div_term,
                                  const DepthField& react_term,
                                  const FractionalState& state) {
  if (!u_n.same_shape(div_term) || !u_n.same_shape(react_term))
    throw std::invalid_argument("fractional_step: shape mismatch");
  const DepthField memory = memory_correction(state, u_n.width(), u_n.height());
  const double scale = state.tau() * state.s_factor();
  std::vector<double> out(u_n.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = u_n[i] + scale * (div_term[i] + react_term[i]) - memory[i];
    if (!std::isfinite(out[i]))
      throw numeric_error("fractional_step: non-finite update");
  }
  return DepthField(u_n.width(), u_n.height(), std::move(out));
}

}  // namespace frdd
