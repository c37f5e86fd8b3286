#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "monopart/distribution.hpp"
#include "monopart/poly.hpp"

namespace monopart {

enum class Orientation { Delegation, Persuasion };
std::string_view to_string(Orientation o) noexcept;

/// Marginal payoff of the form  d/dx payoff(t, x) = state(t) - decision(x).
struct Marginal {
  PiecewisePoly state;
  PiecewisePoly decision;
};

/// The (b, c, d) triple of the linear class.
struct LinearForm {
  PiecewisePoly b;
  PiecewisePoly c;
  PiecewisePoly d;
};

/// Field on [0,1]^2 sampled on a uniform grid and read back by bilinear
/// interpolation. Values are stored row-major with the state as row index.
class Grid2D {
 public:
  static constexpr std::size_t kDefaultSize = 257;

  Grid2D() = default;
  Grid2D(std::size_t n_state, std::size_t n_decision, std::vector<double> values);
  static Grid2D sample(const std::function<double(double, double)>& f,
                       std::size_t n = kDefaultSize);

  std::size_t n_state() const noexcept { return ns_; }
  std::size_t n_decision() const noexcept { return nx_; }
  const std::vector<double>& values() const noexcept { return v_; }
  double at(std::size_t i, std::size_t j) const { return v_[i * nx_ + j]; }

  double operator()(double t, double x) const;
  /// Integral over s in [a, b] of field(t, s); exact for the interpolant.
  double integral_x(double t, double a, double b) const;
  /// Average over t in [a, b] of field(t, x); field(a, x) when a == b.
  double mean_state(double a, double b, double x) const;
  /// g(t, x) = -f(x, t).
  Grid2D transposed_negated() const;

 private:
  std::size_t ns_ = 0, nx_ = 0;
  std::vector<double> v_;
  std::vector<double> cum_;  // per-row running integral in x

  double row_cum(std::size_t i, double x) const;
};

/// A pair of marginal-payoff fields (agent U, principal V) for one of the two
/// problems. Payoff levels are normalized: delegation levels vanish at the
/// top decision, persuasion levels vanish at the bottom decision.
class Primitive {
 public:
  enum class Kind { Linear, Separable, Tabulated };

  static Primitive separable(Marginal u, Marginal v, Orientation o,
                             std::optional<QuantileDistribution> dist = std::nullopt);
  static Primitive tabulated(Grid2D du, Grid2D dv, Orientation o);

  Kind kind() const noexcept { return kind_; }
  Orientation orientation() const noexcept { return orientation_; }
  bool is_tabulated() const noexcept { return kind_ == Kind::Tabulated; }

  const Marginal& u() const;
  const Marginal& v() const;
  const std::optional<LinearForm>& linear_form() const noexcept { return linear_; }
  const Grid2D& du_grid() const;
  const Grid2D& dv_grid() const;

  double state_lo() const noexcept { return state_lo_; }
  double state_hi() const noexcept { return state_hi_; }
  double decision_lo() const noexcept { return decision_lo_; }
  double decision_hi() const noexcept { return decision_hi_; }

  /// Absent means Lebesgue weight on the state domain.
  const std::optional<QuantileDistribution>& state_dist() const noexcept { return dist_; }

  double dU(double t, double x) const;
  double dV(double t, double x) const;
  /// Normalized payoff levels.
  double U(double t, double x) const;
  double V(double t, double x) const;

  /// Antiderivatives (from decision_lo) of the decision parts; separable kinds only.
  const PiecewisePoly& u_decision_integral() const;
  const PiecewisePoly& v_decision_integral() const;

  /// Payoff at the normalization decision as a function of the state. Only
  /// used to report un-normalized values.
  const std::optional<PiecewisePoly>& principal_anchor() const noexcept { return anchor_v_; }
  const std::optional<PiecewisePoly>& agent_anchor() const noexcept { return anchor_u_; }
  Primitive with_anchors(std::optional<PiecewisePoly> principal,
                         std::optional<PiecewisePoly> agent) const;

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  friend Primitive make_linear_primitive(PiecewisePoly, PiecewisePoly, PiecewisePoly, Orientation,
                                         std::optional<QuantileDistribution>);

  Kind kind_ = Kind::Separable;
  Orientation orientation_ = Orientation::Delegation;
  std::optional<Marginal> u_, v_;
  std::optional<LinearForm> linear_;
  std::optional<Grid2D> du_, dv_;
  PiecewisePoly u_int_, v_int_;
  double state_lo_ = 0.0, state_hi_ = 1.0, decision_lo_ = 0.0, decision_hi_ = 1.0;
  std::optional<QuantileDistribution> dist_;
  std::optional<PiecewisePoly> anchor_u_, anchor_v_;
  std::vector<std::string> warnings_;

  void validate_separable();
  void validate_tabulated();
};

/// Linear primitive. Delegation: dU/dx = b(t) - c(x), dV/dx = d(t) - c(x).
/// Persuasion: dU/dx = c(t) - b(x), dV/dx = c(t) - d(x).
Primitive make_linear_primitive(PiecewisePoly b, PiecewisePoly c, PiecewisePoly d, Orientation o,
                                std::optional<QuantileDistribution> dist = std::nullopt);

}  // namespace monopart
