#include "spindecay/thresholds.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <climits>
#include <cmath>
#include <limits>

#include "spindecay/errors.hpp"

namespace spindecay {
namespace {

constexpr int kMaxBisection = 400;
constexpr double kInitialDMax = 200.0;
constexpr double kDMaxLimit = 1e5;

// Bisection for a root of a function that is positive at lo and nonpositive
// at hi. Stops when the bracket no longer shrinks in double precision.
template <typename F>
double Bisect(F&& fn, double lo, double hi) {
  for (int i = 0; i < kMaxBisection; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (fn(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double RecursionMap(double beta, double gamma, double d, double x) {
  return std::pow((beta * x + 1.0) / (x + gamma), d);
}

// Maximizes fn over [lo, hi] with Brent's method (golden section with
// parabolic steps). Returns the argmax.
template <typename F>
double MaximizeOn(F&& fn, double lo, double hi) {
  auto neg = [&](double t) { return -fn(t); };
  return boost::math::tools::brent_find_minima(neg, lo, hi, 52).first;
}

double GammaAt(double beta, double d) { return GammaOfDegree(beta, d).gamma; }

}  // namespace

FixedPoint FixedPointX(double beta, double gamma, double d) {
  if (!(beta >= 0.0) || !(gamma >= 1.0) || !(beta * gamma < 1.0) || !(d >= 1.0) ||
      std::isinf(gamma) || std::isinf(d)) {
    throw InvalidInput("fixed point needs beta >= 0, gamma >= 1, beta*gamma < 1, d >= 1");
  }
  // f(x) - x is strictly decreasing, positive at 0 and negative at 1.
  const double x = Bisect(
      [&](double t) { return RecursionMap(beta, gamma, d, t) - t; }, 0.0, 1.0);
  FixedPoint fp;
  fp.beta = beta;
  fp.gamma = gamma;
  fp.d = d;
  fp.x = x;
  fp.residual = std::abs(RecursionMap(beta, gamma, d, x) - x);
  return fp;
}

double UniquenessLhs(double beta, double gamma, double d) {
  const double x = FixedPointX(beta, gamma, d).x;
  return d * (1.0 - beta * gamma) * x / ((beta * x + 1.0) * (x + gamma));
}

GammaOfD GammaOfDegree(double beta, double d) {
  if (!(d >= 1.0)) throw InvalidInput("gamma(d) needs d >= 1");
  if (!(beta >= 0.0) || !(beta < 1.0)) throw InvalidInput("gamma(d) needs 0 <= beta < 1");
  if (UniquenessLhs(beta, 1.0, d) <= 1.0) return {};

  const double cap = beta > 0.0 ? 1.0 / beta - 1e-9
                                : std::max(2.0, std::pow(d, 1.0 / (d + 1.0)) + 0.1);
  if (UniquenessLhs(beta, cap, d) > 1.0) {
    throw NumericFailure("uniqueness condition still violated at the gamma cap");
  }
  // The left-hand side is strictly decreasing in gamma.
  const double g = Bisect([&](double t) { return UniquenessLhs(beta, t, d) - 1.0; },
                          1.0, cap);
  return {g, true};
}

UniquenessThreshold BigGamma(double beta) {
  if (!(beta >= 0.0) || !(beta < 1.0)) throw InvalidInput("Gamma(beta) needs 0 <= beta < 1");

  UniquenessThreshold out;
  out.beta = beta;
  double d_max = kInitialDMax;
  constexpr double kStep = 0.5;
  double best_d = 1.0;
  for (;;) {
    double best = -1.0;
    for (double d = 1.0; d <= d_max + 1e-12; d += kStep) {
      const double g = GammaAt(beta, d);
      if (g > best) {
        best = g;
        best_d = d;
      }
    }
    out.hit_boundary = best_d + kStep > d_max;
    if (!out.hit_boundary || d_max >= kDMaxLimit) break;
    d_max *= 2.0;
  }
  out.d_max = d_max;

  const double lo = std::max(1.0, best_d - kStep);
  const double hi = std::min(d_max, best_d + kStep);
  double D = MaximizeOn([&](double d) { return GammaAt(beta, d); }, lo, hi);

  // Polish the stationary point: the central-difference slope of gamma(d)
  // changes sign at D and resolves it far below Brent's sqrt(eps) limit.
  constexpr double kSlopeStep = 1e-3;
  auto slope = [&](double d) {
    return GammaAt(beta, d + kSlopeStep) - GammaAt(beta, d - kSlopeStep);
  };
  const double a = std::max(1.0 + kSlopeStep, D - 1e-2);
  const double b = D + 1e-2;
  if (slope(a) > 0.0 && slope(b) < 0.0) D = Bisect(slope, a, b);

  out.D = D;
  out.Gamma = GammaAt(beta, D);
  out.X = FixedPointX(beta, out.Gamma, D).x;
  out.stationarity = std::abs(GammaAt(beta, D + kSlopeStep) - out.Gamma) +
                     std::abs(GammaAt(beta, D - kSlopeStep) - out.Gamma);
  return out;
}

IntegerThreshold BigGammaIntegerBeta0(int d_limit) {
  IntegerThreshold best;
  for (int d = 1; d <= d_limit; ++d) {
    const double dd = d;
    const double value = (dd - 1.0) * std::pow(dd, -dd / (dd + 1.0));
    if (value > best.Gamma) {
      best.Gamma = value;
      best.d = d;
    }
  }
  return best;
}

double Potential(double R, double beta, double D) {
  return std::pow(R, (D + 1.0) / (2.0 * D)) * (beta * R + 1.0);
}

double PotentialGap(double lo, double hi, double beta, double D) {
  if (std::isinf(hi)) return std::numeric_limits<double>::infinity();
  if (hi <= lo) return 0.0;
  // With u = R^{1-a}, a = (D+1)/(2D): dphi = du / ((1-a)(beta u^{1/(1-a)} + 1)),
  // which is smooth at u = 0.
  const double one_minus_a = (D - 1.0) / (2.0 * D);
  const double u_lo = std::pow(lo, one_minus_a);
  const double u_hi = std::pow(hi, one_minus_a);
  if (beta == 0.0) return (u_hi - u_lo) / one_minus_a;
  const double p = 1.0 / one_minus_a;
  auto integrand = [&](double u) { return 1.0 / (beta * std::pow(u, p) + 1.0); };
  double error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, u_lo, u_hi, 15, 1e-12, &error);
  return integral / one_minus_a;
}

double AlphaVec(double beta, double gamma, double D, int d0, int d1,
                std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  if (d1 > 0 && beta == 0.0) return 0.0;
  const double a = (D + 1.0) / (2.0 * D);
  double log_prod = -d0 * std::log(gamma) + (d1 > 0 ? d1 * std::log(beta) : 0.0);
  double sum = 0.0;
  for (double x : xs) {
    log_prod += std::log((beta * x + 1.0) / (x + gamma));
    sum += std::pow(x, a) / (x + gamma);
  }
  const double prod = std::exp(log_prod);
  return (1.0 - beta * gamma) * std::exp((1.0 - a) * log_prod) / (beta * prod + 1.0) * sum;
}

double AlphaSym(double beta, double gamma, double D, double d, double x) {
  if (x <= 0.0) return 0.0;
  const double a = (D + 1.0) / (2.0 * D);
  const double e = d * (1.0 - a);  // d (D-1) / (2D)
  const double log_ratio = std::log((beta * x + 1.0) / (x + gamma));
  const double f = std::exp(d * log_ratio);
  const double log_value = std::log(d) + std::log(1.0 - beta * gamma) + a * std::log(x) +
                           e * std::log(beta * x + 1.0) - (1.0 + e) * std::log(x + gamma) -
                           std::log(beta * f + 1.0);
  return std::exp(log_value);
}

SupAlpha SupAlphaOf(double beta, double gamma) {
  return SupAlphaOf(BigGamma(beta), gamma);
}

SupAlpha SupAlphaOf(const UniquenessThreshold& threshold, double gamma) {
  const double beta = threshold.beta;
  const double D = threshold.D;
  if (!(gamma > threshold.Gamma) || !(beta * gamma < 1.0)) {
    throw RegimeError("sup alpha needs Gamma(beta) < gamma < 1/beta (Gamma = " +
                      std::to_string(threshold.Gamma) + ")");
  }
  constexpr double kDStep = 0.25;
  constexpr int kXSteps = 512;
  double d_max = std::max(kInitialDMax, threshold.d_max);

  SupAlpha out;
  out.D = D;
  for (;;) {
    double best = -1.0;
    for (double d = 1.0; d <= d_max + 1e-12; d += kDStep) {
      for (int i = 1; i <= kXSteps; ++i) {
        const double x = static_cast<double>(i) / kXSteps;
        const double v = AlphaSym(beta, gamma, D, d, x);
        if (v > best) {
          best = v;
          out.d_at = d;
          out.x_at = x;
        }
      }
    }
    out.alpha = best;
    out.hit_boundary = out.d_at + kDStep > d_max;
    if (!out.hit_boundary || d_max >= kDMaxLimit) break;
    d_max *= 2.0;
  }

  // Nested refinement: for each x the maximum over d is unimodal, and the
  // profile max_d alpha(d, x) is unimodal in x.
  const double d_lo = std::max(1.0, out.d_at - 2.0);
  const double d_hi = std::min(d_max, out.d_at + 2.0);
  auto best_d_for = [&](double x) {
    return MaximizeOn([&](double d) { return AlphaSym(beta, gamma, D, d, x); }, d_lo, d_hi);
  };
  auto profile = [&](double x) { return AlphaSym(beta, gamma, D, best_d_for(x), x); };
  // The ridge is long in x relative to the coarse d step, so the x window is
  // wide.
  const double x_lo = std::max(1e-12, out.x_at - 32.0 / kXSteps);
  const double x_hi = std::min(1.0, out.x_at + 32.0 / kXSteps);
  const double x_star = MaximizeOn(profile, x_lo, x_hi);
  const double d_star = best_d_for(x_star);
  const double refined = AlphaSym(beta, gamma, D, d_star, x_star);
  if (refined > out.alpha) {
    out.alpha = refined;
    out.d_at = d_star;
    out.x_at = x_star;
  }
  if (!(out.alpha < 1.0)) {
    throw RegimeError("amortized decay does not stay below 1 at gamma = " +
                      std::to_string(gamma));
  }
  return out;
}

int CeilLog(long long k, int M) {
  if (k <= 1) return 0;
  int j = 0;
  long long p = 1;
  while (p < k) {
    if (p > LLONG_MAX / M) return j + 1;
    p *= M;
    ++j;
  }
  return j;
}

int ChooseM(double beta, double gamma, double alpha, double D) {
  (void)beta;
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw InvalidInput("ChooseM needs alpha in (0, 1)");
  if (!(gamma > 1.0) || !(D > 1.0)) throw InvalidInput("ChooseM needs gamma > 1 and D > 1");
  const double c = (D - 1.0) / (2.0 * D) * std::log(gamma);
  const double log_inv_alpha = -std::log(alpha);
  constexpr double kTol = 1e-12;

  // gap(k) = ln k - k c + ceil(log_M k) ln(1/alpha) must be <= 0 for k >= M.
  auto gap = [&](long long k, int M) {
    return std::log(static_cast<double>(k)) - static_cast<double>(k) * c +
           CeilLog(k, M) * log_inv_alpha;
  };

  for (int M = 2; M < (1 << 20); ++M) {
    if (gap(M, M) > kTol) continue;
    // Upper envelope h(k) >= gap(k) from ceil(log_M k) <= log_M k + 1; it is
    // concave and decreasing once k > slope_coeff / c.
    const double slope_coeff = 1.0 + log_inv_alpha / std::log(static_cast<double>(M));
    auto envelope = [&](double k) {
      return std::log(k) * slope_coeff + log_inv_alpha - k * c;
    };
    double K = std::max(static_cast<double>(M), std::ceil(slope_coeff / c));
    while (envelope(K) > 0.0) K *= 2.0;
    bool ok = true;
    for (long long k = M; k <= static_cast<long long>(K); ++k) {
      if (gap(k, M) > kTol) {
        ok = false;
        break;
      }
    }
    if (ok) return M;
  }
  throw NumericFailure("no base M below 2^20 satisfies the branching inequality");
}

bool IdentityReport::all_hold() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.holds; });
}

IdentityReport CheckFixedPointIdentities(double beta, double tolerance) {
  IdentityReport report;
  report.threshold = BigGamma(beta);
  const double G = report.threshold.Gamma;
  const double D = report.threshold.D;
  const double X = report.threshold.X;

  const double ratio_bound = std::sqrt(beta * G);
  const double arity_bound = (D - 1.0) / (D + 1.0);
  report.checks.push_back({"beta/Gamma <= sqrt(beta*Gamma)",
                           std::max(0.0, beta / G - ratio_bound),
                           beta / G <= ratio_bound + tolerance});
  report.checks.push_back({"sqrt(beta*Gamma) < (D-1)/(D+1)",
                           std::max(0.0, ratio_bound - arity_bound), ratio_bound < arity_bound});

  const double bx1 = beta * X + 1.0;
  const double lhs = std::log(bx1 / (X + G));
  const double rhs1 = 2.0 * bx1 / ((D + 1.0) * bx1 - 2.0 * D);
  const double rhs2 = 2.0 * D * (1.0 - beta * G) * X / (bx1 * (2.0 * D * X - (D + 1.0) * (X + G)));
  report.checks.push_back({"ln((bX+1)/(X+G)) = 2(bX+1)/((D+1)(bX+1)-2D)",
                           std::abs(lhs - rhs1), std::abs(lhs - rhs1) <= tolerance});
  report.checks.push_back({"ln((bX+1)/(X+G)) = 2D(1-bG)X/((bX+1)(2DX-(D+1)(X+G)))",
                           std::abs(lhs - rhs2), std::abs(lhs - rhs2) <= tolerance});
  return report;
}

ThresholdProfile MakeProfile(double beta, double gamma) {
  ThresholdProfile p;
  p.beta = beta;
  p.gamma = gamma;
  p.threshold = BigGamma(beta);
  p.sup = SupAlphaOf(p.threshold, gamma);
  p.M = ChooseM(beta, gamma, p.sup.alpha, p.threshold.D);
  return p;
}

}  // namespace spindecay
