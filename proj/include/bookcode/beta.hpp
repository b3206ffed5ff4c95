#pragma once

#include <vector>

namespace bookcode {

/// Beta distribution parameterized by its mode and a sharpness value
/// (the second shape parameter). The first shape parameter follows from
/// the mode: alpha = (m * beta - 2m + 1) / (1 - m).
struct BetaParams {
  static constexpr double kModeEpsilon = 1e-3;

  double mode = 0.5;
  double sharpness = 5.0;

  /// Mode clamped to [kModeEpsilon, 1 - kModeEpsilon].
  double clamped_mode() const;
  double alpha() const;
  double beta() const { return sharpness; }
};

/// Regularized incomplete beta function I_x(a, b), evaluated with a
/// continued fraction (modified Lentz, relative tolerance 1e-15).
double regularized_incomplete_beta(double a, double b, double x);

/// Probability mass of the i-th of M equal-width slices of [0, 1]
/// (1-based). Throws std::domain_error when M == 0 or i is out of range.
double beta_interval_prob(const BetaParams& p, int M, int i);

/// Masses of all M slices; they telescope to 1.
std::vector<double> beta_interval_probs(const BetaParams& p, int M);

}  // namespace bookcode
