#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "spindecay/errors.hpp"
#include "spindecay/thresholds.hpp"

using namespace spindecay;

namespace {

double IntegerClosedForm(double d) { return (d - 1.0) * std::pow(d, -d / (d + 1.0)); }

}  // namespace

TEST_CASE("fixed point: analytic roots") {
  CHECK(FixedPointX(0.0, 1.0, 1.0).x == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));
  CHECK(FixedPointX(0.0, 2.0, 1.0).x == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
  const FixedPoint fp = FixedPointX(0.1, 3.0, 2.0);
  CHECK(fp.residual <= 1e-12);
  CHECK(fp.x > 0.0);
  CHECK(fp.x < 1.0);
  // Sign change of f(x) - x found by a plain scan brackets the root.
  auto g = [](double x) { return std::pow((0.1 * x + 1.0) / (x + 3.0), 2.0) - x; };
  double lo = 0.0;
  for (double x = 0.0; x < 1.0; x += 1e-4) {
    if (g(x) > 0) lo = x;
  }
  CHECK(fp.x >= lo);
  CHECK(fp.x <= lo + 1e-4);
}

TEST_CASE("fixed point: grid of parameters") {
  int points = 0;
  for (double beta : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (int gi = 0; gi < 20; ++gi) {
      const double gamma = 1.0 + gi * 0.05;
      if (beta * gamma >= 1.0) continue;
      for (double d : {1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 11.0, 17.5, 30.0, 60.0, 120.0, 200.0, 400.0, 1000.0, 4000.0}) {
        const FixedPoint fp = FixedPointX(beta, gamma, d);
        CHECK(fp.residual <= 1e-12);
        CHECK(fp.x > 0.0);
        CHECK(fp.x < 1.0);
        ++points;
      }
    }
  }
  CHECK(points >= 1000);
}

TEST_CASE("fixed point: input validation") {
  CHECK_THROWS_AS(FixedPointX(0.0, 0.5, 2.0), InvalidInput);
  CHECK_THROWS_AS(FixedPointX(0.5, 2.0, 2.0), InvalidInput);
  CHECK_THROWS_AS(FixedPointX(0.0, 2.0, 0.5), InvalidInput);
  CHECK_THROWS_AS(FixedPointX(-0.1, 2.0, 2.0), InvalidInput);
}

TEST_CASE("uniqueness lhs") {
  const double g_int = 10.0 * std::pow(11.0, -11.0 / 12.0);
  CHECK(UniquenessLhs(0.0, g_int, 11.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(UniquenessLhs(0.0, 2.0, 11.0) < 1.0);
  for (double beta : {0.0, 0.2, 0.5}) {
    for (double d : {2.0, 11.0, 40.0}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double gamma = 1.0; gamma * beta < 1.0 && gamma < 4.0; gamma += 0.05) {
        const double v = UniquenessLhs(beta, gamma, d);
        CHECK(v < prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("gamma(d)") {
  const GammaOfD two = GammaOfDegree(0.0, 2.0);
  CHECK(two.gamma == 1.0);
  CHECK_FALSE(two.solved);
  const GammaOfD eleven = GammaOfDegree(0.0, 11.0);
  CHECK(eleven.solved);
  CHECK(eleven.gamma == doctest::Approx(10.0 * std::pow(11.0, -11.0 / 12.0)).epsilon(1e-9));
  CHECK(GammaOfDegree(0.0, 12.0).gamma == doctest::Approx(11.0 * std::pow(12.0, -12.0 / 13.0)).epsilon(1e-9));
}

TEST_CASE("gamma(d) matches the closed form for integer d at beta = 0") {
  for (int d = 2; d <= 50; ++d) {
    const double closed = IntegerClosedForm(d);
    const GammaOfD g = GammaOfDegree(0.0, d);
    if (closed > 1.0) {
      CHECK(g.solved);
      CHECK(std::abs(g.gamma - closed) <= 1e-8);
    } else {
      CHECK_FALSE(g.solved);
      CHECK(g.gamma == 1.0);
    }
  }
}

TEST_CASE("uniqueness threshold values") {
  const UniquenessThreshold t = BigGamma(0.0);
  CHECK(std::abs(t.Gamma - 1.1101715) <= 1e-6);
  CHECK(t.D > 11.0);
  CHECK(t.D < 12.0);
  CHECK(t.X == doctest::Approx(FixedPointX(0.0, t.Gamma, t.D).x).epsilon(1e-12));
  CHECK(GammaOfDegree(0.0, t.D).gamma == doctest::Approx(t.Gamma).epsilon(1e-12));
  CHECK_FALSE(t.hit_boundary);
  for (double beta : {0.0, 0.2, 0.5}) {
    const UniquenessThreshold u = BigGamma(beta);
    CHECK(u.Gamma > 1.0);
    if (beta > 0) CHECK(u.Gamma < 1.0 / beta);
  }
}

TEST_CASE("threshold is stationary in d") {
  for (double beta : {0.0, 0.1, 0.3, 0.5}) {
    const UniquenessThreshold t = BigGamma(beta);
    for (double h : {1e-2, 1e-3}) {
      const double up = t.Gamma - GammaOfDegree(beta, t.D + h).gamma;
      const double down = t.Gamma - GammaOfDegree(beta, t.D - h).gamma;
      CHECK(up >= -1e-12);
      CHECK(down >= -1e-12);
      CHECK(up <= 10.0 * h * h);
      CHECK(down <= 10.0 * h * h);
    }
  }
}

TEST_CASE("integer threshold at beta = 0") {
  const IntegerThreshold it = BigGammaIntegerBeta0();
  CHECK(it.d == 11);
  CHECK(std::abs(it.Gamma - 10.0 * std::pow(11.0, -11.0 / 12.0)) <= 1e-12);
  CHECK(it.Gamma == doctest::Approx(1.1101714).epsilon(1e-7));
  CHECK(it.Gamma < BigGamma(0.0).Gamma);
}

TEST_CASE("potential") {
  CHECK(Potential(0.0, 0.3, 11.0) == 0.0);
  CHECK(Potential(1.0, 0.3, 11.0) == doctest::Approx(1.3));
  CHECK(Potential(0.5, 0.0, 11.0) == doctest::Approx(std::pow(0.5, 6.0 / 11.0)).epsilon(1e-14));
}

TEST_CASE("potential gap is the integral of 1/Phi") {
  for (double beta : {0.0, 0.3, 0.7}) {
    for (auto [lo, hi] : {std::pair{0.1, 0.4}, std::pair{0.0, 0.5}, std::pair{0.3, 0.3}, std::pair{0.2, 1.0}}) {
      // Midpoint rule on u = R^{1/2} removes the endpoint singularity at 0.
      const double D = 7.5;
      const int steps = 400000;
      const double a = std::sqrt(lo), b = std::sqrt(hi);
      double sum = 0.0;
      for (int i = 0; i < steps; ++i) {
        const double u = a + (b - a) * (i + 0.5) / steps;
        sum += 2.0 * u / Potential(u * u, beta, D);
      }
      sum *= (b - a) / steps;
      CHECK(PotentialGap(lo, hi, beta, D) == doctest::Approx(sum).epsilon(1e-6));
    }
  }
}

TEST_CASE("alpha at the critical point") {
  for (double beta : {0.0, 0.1, 0.3, 0.5}) {
    const UniquenessThreshold t = BigGamma(beta);
    CHECK(std::abs(AlphaSym(beta, t.Gamma, t.D, t.D, t.X) - 1.0) <= 1e-6);
  }
  const IntegerThreshold it = BigGammaIntegerBeta0();
  // At the integer threshold the fixed point is x = gamma / (d - 1).
  const double x = it.Gamma / 10.0;
  CHECK(FixedPointX(0.0, it.Gamma, 11.0).x == doctest::Approx(x).epsilon(1e-9));
  CHECK(std::abs(AlphaSym(0.0, it.Gamma, 11.0, 11.0, x) - 1.0) <= 1e-6);
}

TEST_CASE("alpha has a critical point at (D, X)") {
  for (double beta : {0.0, 0.3}) {
    const UniquenessThreshold t = BigGamma(beta);
    const double h = 1e-4;
    const double dd = (AlphaSym(beta, t.Gamma, t.D, t.D + h, t.X) -
                       AlphaSym(beta, t.Gamma, t.D, t.D - h, t.X)) / (2 * h);
    const double dx = (AlphaSym(beta, t.Gamma, t.D, t.D, t.X + h) -
                       AlphaSym(beta, t.Gamma, t.D, t.D, t.X - h)) / (2 * h);
    CHECK(std::abs(dd) <= 1e-4);
    CHECK(std::abs(dx) <= 1e-4);
  }
}

TEST_CASE("alpha vector form") {
  const UniquenessThreshold t = BigGamma(0.0);
  const std::vector<double> one{t.X};
  CHECK(AlphaVec(0.0, t.Gamma, t.D, 0, 0, one) < 1.0);
  const std::vector<double> same(5, 0.37);
  CHECK(AlphaVec(0.3, 1.7, 9.0, 0, 0, same) ==
        doctest::Approx(AlphaSym(0.3, 1.7, 9.0, 5.0, 0.37)).epsilon(1e-12));
  // A blue-fixed child at beta = 0 forces R = 0: no sensitivity left.
  CHECK(AlphaVec(0.0, 2.0, t.D, 0, 1, same) == 0.0);
}

TEST_CASE("alpha vector form never exceeds the supremum") {
  const double beta = 0.0, gamma = 2.0;
  const SupAlpha sup = SupAlphaOf(beta, gamma);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 12000; ++i) {
    const int d = 1 + static_cast<int>(rng() % 30);
    const int d0 = i % 4 == 0 ? static_cast<int>(rng() % 3) : 0;
    std::vector<double> xs(d);
    for (auto& x : xs) x = std::max(1e-9, unit(rng));
    worst = std::max(worst, AlphaVec(beta, gamma, sup.D, d0, 0, xs));
  }
  CHECK(worst <= sup.alpha + 1e-9);
}

TEST_CASE("alpha decreases in gamma") {
  for (double beta : {0.0, 0.2}) {
    const UniquenessThreshold t = BigGamma(beta);
    for (double d : {2.0, t.D, 25.0}) {
      for (double x : {0.05, t.X, 0.6}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double gamma = t.Gamma; gamma < 3.0 && beta * gamma < 1.0; gamma += 0.1) {
          const double a = AlphaSym(beta, gamma, t.D, d, x);
          CHECK(a < prev);
          prev = a;
        }
      }
    }
  }
}

TEST_CASE("sup alpha") {
  const SupAlpha s2 = SupAlphaOf(0.0, 2.0);
  CHECK(s2.alpha < 1.0);
  CHECK_FALSE(s2.hit_boundary);
  // Dense scan as an independent check.
  for (auto [beta, gamma] : {std::pair{0.0, 2.0}, std::pair{0.0, 1.2}, std::pair{0.3, 2.0}}) {
    const SupAlpha s = SupAlphaOf(beta, gamma);
    double scan = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double d = 1.0 + i * 0.03;
      for (int j = 1; j <= 1000; ++j) {
        scan = std::max(scan, AlphaSym(beta, gamma, s.D, d, j / 1000.0));
      }
    }
    CHECK(s.alpha >= scan - 1e-12);
    CHECK(s.alpha <= scan + 1e-5);
  }

  const UniquenessThreshold t = BigGamma(0.0);
  const SupAlpha near = SupAlphaOf(0.0, t.Gamma + 1e-6);
  CHECK(near.alpha < 1.0);
  CHECK(near.alpha > 0.999);
  CHECK(SupAlphaOf(0.0, 1.5).alpha > SupAlphaOf(0.0, 2.0).alpha);

  CHECK_THROWS_AS(SupAlphaOf(0.0, 1.05), RegimeError);
  CHECK_THROWS_AS(SupAlphaOf(0.5, 2.5), RegimeError);
}

TEST_CASE("ceil log by integer comparison") {
  CHECK(CeilLog(1, 2) == 0);
  CHECK(CeilLog(2, 2) == 1);
  CHECK(CeilLog(3, 2) == 2);
  CHECK(CeilLog(4, 2) == 2);
  CHECK(CeilLog(5, 2) == 3);
  CHECK(CeilLog(18, 18) == 1);
  CHECK(CeilLog(19, 18) == 2);
  CHECK(CeilLog(324, 18) == 2);
  CHECK(CeilLog(325, 18) == 3);
  CHECK(CeilLog(1000000000000LL, 10) == 12);
  CHECK(CeilLog(1000000000001LL, 10) == 13);
}

TEST_CASE("choose M") {
  const double beta = 0.0;
  const SupAlpha s2 = SupAlphaOf(beta, 2.0);
  const int M2 = ChooseM(beta, 2.0, s2.alpha, s2.D);
  CHECK(M2 >= 2);
  const double c = (s2.D - 1.0) / (2.0 * s2.D) * std::log(2.0);
  auto holds = [&](int M, long long k) {
    return std::log(static_cast<double>(k)) - k * c <= CeilLog(k, M) * std::log(s2.alpha) + 1e-12;
  };
  for (long long k = M2; k <= 10000; ++k) CHECK(holds(M2, k));
  if (M2 > 2) {
    bool fails = false;
    for (long long k = M2 - 1; k <= 10000 && !fails; ++k) fails = !holds(M2 - 1, k);
    CHECK(fails);
  }
  const SupAlpha s12 = SupAlphaOf(beta, 1.2);
  CHECK(ChooseM(beta, 1.2, s12.alpha, s12.D) >= M2);
}

TEST_CASE("fixed-point identities") {
  for (double beta : {0.0, 0.3}) {
    const IdentityReport r = CheckFixedPointIdentities(beta);
    CHECK(r.all_hold());
    for (const auto& c : r.checks) CHECK(c.residual <= 1e-6);
  }
}

TEST_CASE("profile") {
  const ThresholdProfile p = MakeProfile(0.0, 2.0);
  CHECK(p.sup.alpha < 1.0);
  CHECK(p.M >= 2);
  CHECK(p.threshold.Gamma == doctest::Approx(1.1101715).epsilon(1e-6));
}
