#include "bookcode/beta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bookcode {

namespace {

constexpr int kMaxIterations = 100000;
constexpr double kTolerance = 1e-15;
constexpr double kTiny = 1e-300;

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

// Continued fraction for I_x(a, b); converges fast for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kTolerance) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

// Lower regularized tail for the slice boundary, or the upper one when the
// slice lies right of the mode. Both are accurate where they are small.
double lower_tail(const BetaParams& p, double x) {
  return regularized_incomplete_beta(p.alpha(), p.beta(), x);
}

double upper_tail(const BetaParams& p, double x) {
  return regularized_incomplete_beta(p.beta(), p.alpha(), 1.0 - x);
}

double slice(const BetaParams& p, int M, int i) {
  const double lo = static_cast<double>(i - 1) / M;
  const double hi = static_cast<double>(i) / M;
  const double mass = hi <= p.clamped_mode() ? lower_tail(p, hi) - lower_tail(p, lo)
                                             : upper_tail(p, lo) - upper_tail(p, hi);
  return std::max(mass, 0.0);
}

void check_slices(int M) {
  if (M < 1) throw std::domain_error("beta_interval_prob: M must be positive");
}

}  // namespace

double BetaParams::clamped_mode() const {
  return std::clamp(mode, kModeEpsilon, 1.0 - kModeEpsilon);
}

double BetaParams::alpha() const {
  const double m = clamped_mode();
  return (m * sharpness - 2.0 * m + 1.0) / (1.0 - m);
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("incomplete beta: shape must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("incomplete beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double beta_interval_prob(const BetaParams& p, int M, int i) {
  check_slices(M);
  if (i < 1 || i > M) {
    throw std::domain_error("beta_interval_prob: slice " + std::to_string(i) + " outside 1.." +
                            std::to_string(M));
  }
  return slice(p, M, i);
}

std::vector<double> beta_interval_probs(const BetaParams& p, int M) {
  check_slices(M);
  const double a = p.alpha();
  const double b = p.beta();
  const double mode = p.clamped_mode();
  // Boundary tails, each computed once; slice i uses boundaries i-1 and i.
  std::vector<double> tails(static_cast<std::size_t>(M) + 1);
  std::vector<double> out(static_cast<std::size_t>(M));
  for (int k = 0; k <= M; ++k) {
    const double x = static_cast<double>(k) / M;
    // Slices ending at or before the mode read lower tails; later ones read
    // upper tails. Boundary k serves slices k and k+1.
    const bool lower_needed = x <= mode;
    tails[k] = lower_needed ? regularized_incomplete_beta(a, b, x)
                            : regularized_incomplete_beta(b, a, 1.0 - x);
  }
  for (int i = 1; i <= M; ++i) {
    const double hi = static_cast<double>(i) / M;
    if (hi <= mode) {
      out[i - 1] = std::max(tails[i] - tails[i - 1], 0.0);
    } else {
      const double lo = static_cast<double>(i - 1) / M;
      // The left boundary may have been stored as a lower tail.
      const double upper_lo = lo <= mode ? regularized_incomplete_beta(b, a, 1.0 - lo) : tails[i - 1];
      out[i - 1] = std::max(upper_lo - tails[i], 0.0);
    }
  }
  return out;
}

}  // namespace bookcode
