#pragma once

#include <cstddef>
#include <optional>

#include "monopart/agent.hpp"
#include "monopart/distribution.hpp"
#include "monopart/monotone_set.hpp"
#include "monopart/primitive.hpp"

namespace monopart {

struct Payoffs {
  double principal;
  double agent;
  /// Normalized value plus the expected anchor, when the primitive declares one.
  std::optional<double> principal_unnormalized;
  std::optional<double> agent_unnormalized;
};

/// Expected normalized payoffs when the agent best-responds to pi. States are
/// weighted by Lebesgue measure on the state domain (uniform on [0, 1] after
/// quantile reparameterization, which is applied when a distribution is
/// attached). Piecewise Gauss-Legendre between detected kinks for separable
/// primitives; composite trapezoid with n nodes for tabulated ones.
Payoffs expected_payoffs(const Primitive& p, const MonotoneSet& pi,
                         TieBreak tb = TieBreak::PrincipalPreferred, std::size_t n = 4097);

/// Contribution of one cell of a persuasion partition: a separated stretch
/// [lo, hi] or the pooling interval [lo, hi). Expects a uniform state.
Payoffs persuasion_cell_payoffs(const Primitive& p, double lo, double hi, bool pooled,
                                TieBreak tb = TieBreak::PrincipalPreferred, std::size_t n = 4097);

class NuFunction;
NuFunction build_nu(const Primitive& p);

/// Principal's value as a function of the induced posterior mean.
class NuFunction {
 public:
  enum class Source { Regulation, LinearDelegation, LinearPersuasion, Direct };

  /// nu(m) = int_0^{2m-1} (m - g) f(g) dg, zero for m <= 1/2 and m - E[g]
  /// for m >= 1; f is a density on [0, 1]. Domain [0, m_hi].
  static NuFunction regulation(const PiecewisePoly& f, double m_hi = 2.0);
  /// nu(m) = int_0^m (m - d(t)) f(t) dt on [0, 1], zero below, m - E[d] above.
  static NuFunction linear_delegation(const PiecewisePoly& d, const PiecewisePoly& f, double m_lo,
                                      double m_hi);
  static NuFunction direct(PiecewisePoly nu);

  Source source() const noexcept { return source_; }
  const PiecewisePoly& nu() const noexcept { return nu_; }
  const PiecewisePoly& dnu() const noexcept { return dnu_; }
  double lo() const { return nu_.lo(); }
  double hi() const { return nu_.hi(); }
  double operator()(double m) const { return nu_(m); }
  double slope_right(double m) const { return dnu_.right_limit(m); }
  double slope_left(double m) const { return dnu_.left_limit(m); }
  /// m -> nu(lo + hi - m).
  NuFunction reflected() const;

 private:
  friend NuFunction build_nu(const Primitive& p);
  NuFunction(PiecewisePoly nu, Source s);
  PiecewisePoly nu_, dnu_;
  Source source_;
};

/// nu for a linear persuasion primitive (delegation primitives are
/// transformed first). Exact when the receiver's decision part is piecewise
/// linear; the principal's state part must equal the agent's.
NuFunction build_nu(const Primitive& p);

/// Integral over the domain of pi of nu(m_pi(s)), with m the pool mean of c
/// (states weighted by Lebesgue measure; any attached distribution must be uniform).
double expected_nu(const MonotoneSet& pi, const NuFunction& nu, const PiecewisePoly& c,
                   const std::optional<QuantileDistribution>& dist = std::nullopt);

/// Integral of nu(c(s)) over [a, b] (fully separated stretch).
double separated_value(const NuFunction& nu, const PiecewisePoly& c, double a, double b);
/// (b - a) * nu(mean of c over [a, b]).
double pooled_value(const NuFunction& nu, const PiecewisePoly& c, double a, double b);

}  // namespace monopart
