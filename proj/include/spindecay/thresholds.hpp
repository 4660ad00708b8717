#pragma once

#include <span>
#include <string>
#include <vector>

namespace spindecay {

// Positive fixed point of x = ((beta x + 1) / (x + gamma))^d.
struct FixedPoint {
  double beta = 0.0;
  double gamma = 0.0;
  double d = 0.0;
  double x = 0.0;
  double residual = 0.0;
};

// Bisection over (0, 1). Requires beta >= 0, beta*gamma < 1, gamma >= 1,
// d >= 1; throws InvalidInput otherwise.
FixedPoint FixedPointX(double beta, double gamma, double d);

// d (1 - beta gamma) x / ((beta x + 1)(x + gamma)) at x = x(gamma, d): the
// modulus of the symmetric recursion's derivative at its fixed point.
double UniquenessLhs(double beta, double gamma, double d);

// gamma(d): the gamma in (1, 1/beta) where UniquenessLhs crosses 1. When no
// crossing exists the value is 1 and `solved` is false.
struct GammaOfD {
  double gamma = 1.0;
  bool solved = false;
};
GammaOfD GammaOfDegree(double beta, double d);

// Gamma(beta) = sup_d gamma(d), attained at the critical arity D, with
// X = x(Gamma, D).
struct UniquenessThreshold {
  double beta = 0.0;
  double Gamma = 1.0;
  double D = 1.0;
  double X = 0.0;
  // |gamma(D + h) - Gamma| + |gamma(D - h) - Gamma| at h = 1e-3; O(h^2) at a
  // stationary point.
  double stationarity = 0.0;
  double d_max = 0.0;
  // Set if the maximizer sat on the upper end of the search range.
  bool hit_boundary = false;
};
UniquenessThreshold BigGamma(double beta);

// max over integer d of (d-1) d^{-d/(d+1)}: the integer-arity threshold at
// beta = 0.
struct IntegerThreshold {
  double Gamma = 0.0;
  int d = 0;
};
IntegerThreshold BigGammaIntegerBeta0(int d_limit = 200);

// Potential Phi(R) = R^{(D+1)/(2D)} (beta R + 1).
double Potential(double R, double beta, double D);

// phi(hi) - phi(lo) where phi' = 1/Phi. Closed form when beta == 0, adaptive
// Gauss-Kronrod quadrature otherwise.
double PotentialGap(double lo, double hi, double beta, double D);

// Amortized decay for a node with d1 blue-fixed, d0 green-fixed and
// xs.size() free children.
double AlphaVec(double beta, double gamma, double D, int d0, int d1,
                std::span<const double> xs);

// Symmetric form alpha(d, x) = alpha(d; x, ..., x) for real d >= 1.
double AlphaSym(double beta, double gamma, double D, double d, double x);

struct SupAlpha {
  double alpha = 0.0;
  double d_at = 0.0;
  double x_at = 0.0;
  double D = 0.0;
  bool hit_boundary = false;
};
// sup over d in [1, d_max], x in (0, 1] of AlphaSym. Throws RegimeError when
// gamma is not above Gamma(beta) or the supremum does not stay below 1.
SupAlpha SupAlphaOf(double beta, double gamma);
SupAlpha SupAlphaOf(const UniquenessThreshold& threshold, double gamma);

// Smallest M >= 2 with k / gamma^{k(D-1)/(2D)} <= alpha^{ceil(log_M k)} for
// every k >= M. Throws NumericFailure if none exists below 2^20.
int ChooseM(double beta, double gamma, double alpha, double D);

// ceil(log_M k) for k >= 1, by integer comparison.
int CeilLog(long long k, int M);

struct IdentityCheck {
  std::string name;
  double residual = 0.0;
  bool holds = false;
};
struct IdentityReport {
  UniquenessThreshold threshold;
  std::vector<IdentityCheck> checks;
  bool all_hold() const;
};
// Checks beta/Gamma <= sqrt(beta Gamma) < (D-1)/(D+1) and the two closed
// forms of ln((beta X + 1)/(X + Gamma)) at the computed (Gamma, D, X).
IdentityReport CheckFixedPointIdentities(double beta, double tolerance = 1e-6);

// Everything the partition-function driver needs at one (beta, gamma).
struct ThresholdProfile {
  double beta = 0.0;
  double gamma = 0.0;
  UniquenessThreshold threshold;
  SupAlpha sup;
  int M = 2;
};
ThresholdProfile MakeProfile(double beta, double gamma);

}  // namespace spindecay
