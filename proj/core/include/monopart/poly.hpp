#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace monopart {

/// Dense polynomial coefficients in ascending degree: c[0] + c[1] t + ...
using Coeffs = std::vector<double>;

namespace poly {

double eval(std::span<const double> c, double t) noexcept;
Coeffs derivative(std::span<const double> c);
/// Antiderivative with zero constant term.
Coeffs antiderivative(std::span<const double> c);
Coeffs add(std::span<const double> a, std::span<const double> b);
Coeffs sub(std::span<const double> a, std::span<const double> b);
Coeffs mul(std::span<const double> a, std::span<const double> b);
Coeffs scale(std::span<const double> a, double s);
/// q(u) = p(a * u + k).
Coeffs shift_scale(std::span<const double> p, double a, double k);
/// q(u) = outer(inner(u)).
Coeffs compose(std::span<const double> outer, std::span<const double> inner);
/// Drops trailing zero coefficients (keeps at least one).
void trim(Coeffs& c);
std::size_t degree(std::span<const double> c) noexcept;

}  // namespace poly

/// Piecewise polynomial on [breaks.front(), breaks.back()].
///
/// Piece i lives on [breaks[i], breaks[i+1]] and is stored in the local
/// coordinate (t - breaks[i]). Evaluation at an interior breakpoint uses the
/// right piece; evaluation at the right end uses the last piece. Values are
/// accepted up to kDomainSlack outside the domain and clamped.
class PiecewisePoly {
 public:
  /// Degree accepted for user-supplied functions (scenario files).
  static constexpr std::size_t kMaxInputDegree = 6;
  static constexpr double kDomainSlack = 1e-12;

  PiecewisePoly() = default;
  PiecewisePoly(std::vector<double> breaks, std::vector<Coeffs> pieces);

  static PiecewisePoly constant(double value, double lo, double hi);
  /// Single piece given by coefficients in the global coordinate t.
  static PiecewisePoly from_global(std::span<const double> global, double lo, double hi);
  static PiecewisePoly identity(double lo, double hi);
  /// Joins functions on adjacent domains (each one's hi equals the next one's lo).
  static PiecewisePoly concat(std::span<const PiecewisePoly> parts);

  bool empty() const noexcept { return pieces_.empty(); }
  double lo() const { return breaks_.front(); }
  double hi() const { return breaks_.back(); }
  std::span<const double> breaks() const noexcept { return breaks_; }
  std::span<const Coeffs> pieces() const noexcept { return pieces_; }
  std::size_t num_pieces() const noexcept { return pieces_.size(); }
  std::size_t max_degree() const noexcept;
  bool continuous() const noexcept { return continuous_; }

  double operator()(double t) const;
  double left_limit(double t) const;
  double right_limit(double t) const;
  /// Index of the piece used by operator() at t.
  std::size_t piece_index(double t) const;

  PiecewisePoly derivative() const;
  /// Continuous antiderivative that vanishes at lo().
  PiecewisePoly antiderivative() const;
  /// Exact integral over [a, b] (a may exceed b).
  double integral(double a, double b) const;
  /// q(t) = p(alpha * t + beta), alpha != 0; domain is the preimage of p's domain.
  PiecewisePoly compose_affine(double alpha, double beta) const;
  PiecewisePoly restrict_to(double a, double b) const;
  /// Same function on a refined set of breakpoints (superset of the current ones).
  PiecewisePoly refine(std::span<const double> extra_breaks) const;

  PiecewisePoly operator+(const PiecewisePoly& o) const;
  PiecewisePoly operator-(const PiecewisePoly& o) const;
  PiecewisePoly operator*(const PiecewisePoly& o) const;
  PiecewisePoly operator*(double s) const;
  PiecewisePoly operator+(double s) const;

  /// For a nondecreasing function: inf{t : p(t) >= y}, clamped to the domain.
  double lower_preimage(double y) const;
  /// For a nondecreasing function: sup{t : p(t) <= y}, clamped to the domain.
  double upper_preimage(double y) const;

  /// Checks p(t2) >= p(t1) - tol for sorted sample pairs on an n-point grid plus
  /// both one-sided limits at breakpoints.
  bool nondecreasing(double tol, std::size_t grid = 1024) const;
  /// Minimum of p' over an n-point grid plus one-sided breakpoint values.
  double min_derivative(std::size_t grid = 1024) const;
  /// Largest |left - right| over interior breakpoints.
  double max_jump() const;

  bool approx_equal(const PiecewisePoly& o, double tol) const;

 private:
  std::vector<double> breaks_;
  std::vector<Coeffs> pieces_;
  bool continuous_ = true;

  double eval_piece(std::size_t i, double t) const;
  double clamp_domain(double t) const;
};

/// outer(inner(t)) for a nondecreasing inner whose range lies in outer's domain.
/// Exact at coefficient level; breakpoints of outer are pulled back through inner.
PiecewisePoly compose(const PiecewisePoly& outer, const PiecewisePoly& inner);

/// Merged, sorted, de-duplicated breakpoints of two functions on the same domain.
std::vector<double> merge_breaks(std::span<const double> a, std::span<const double> b,
                                 double tol = 1e-14);

}  // namespace monopart
