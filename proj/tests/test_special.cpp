#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "numeric_oracles.hpp"
#include "percap/special.hpp"

using namespace percap;

using percap::oracle::erfcx_cf_positive;
using percap::oracle::erfcx_oracle;
using percap::oracle::normal_moment;

TEST_SUITE("quadrature") {
  TEST_CASE("order below two is rejected") {
    CHECK_THROWS_AS(gauss_hermite_rule(1), InvalidArgument);
    CHECK_THROWS_AS(gauss_hermite_rule(-3), InvalidArgument);
  }

  TEST_CASE("two-point rule") {
    const auto r = gauss_hermite_rule(2);
    REQUIRE(r.size() == 2);
    CHECK(r.nodes[0] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(r.nodes[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.weights[1] == doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("rule invariants hold across orders") {
    for (int order : {2, 3, 5, 8, 17, 20, 33, 64, 100, 200, 201}) {
      CAPTURE(order);
      const auto r = gauss_hermite_rule(order);
      REQUIRE(r.size() == static_cast<std::size_t>(order));
      double sum = 0.0, var = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(r.weights[i] > 0.0);
        sum += r.weights[i];
        var += r.weights[i] * r.nodes[i] * r.nodes[i];
        const std::size_t mirror = r.size() - 1 - i;
        CHECK(r.nodes[mirror] == -r.nodes[i]);
        CHECK(r.weights[mirror] == r.weights[i]);
        if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
      }
      CHECK(std::fabs(sum - 1.0) <= 1e-12);
      CHECK(std::fabs(var - 1.0) <= 1e-10);
    }
  }

  TEST_CASE("moment exactness up to degree 2n-1") {
    for (int order = 2; order <= 64; ++order) {
      const auto r = gauss_hermite_rule(order);
      for (int k = 0; k <= 2 * order - 1; ++k) {
        const double got = expect_normal([k](double h) { return std::pow(h, k); }, r);
        const long double want = normal_moment(k);
        if (want == 0.0L) {
          // Odd moments vanish by symmetry; scale by the neighbouring even moment.
          const double scale = static_cast<double>(normal_moment(k + 1));
          CHECK_MESSAGE(std::fabs(got) <= 1e-12 * scale, "order " << order << " k " << k);
        } else {
          const double rel = std::fabs(static_cast<double>((got - want) / want));
          CHECK_MESSAGE(rel <= 1e-9, "order " << order << " k " << k << " rel " << rel);
        }
      }
    }
  }

  TEST_CASE("large orders drop only underflowing weights") {
    const auto r = gauss_hermite_rule(400);
    CHECK(r.order == 400);
    CHECK(r.size() <= 400u);
    CHECK(r.size() > 380u);
    CHECK(r.size() % 2 == 0);
    double sum = 0.0;
    for (double w : r.weights) {
      CHECK(w > 0.0);
      sum += w;
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
  }

  TEST_CASE("spot values") {
    const auto r20 = gauss_hermite_rule(20);
    CHECK(std::fabs(expect_normal([](double h) { return h * h; }, r20) - 1.0) <= 1e-12);

    const auto r200 = gauss_hermite_rule(200);
    CHECK(std::fabs(expect_normal([](double) { return 1.0; }, r200) - 1.0) <= 1e-12);
    CHECK(std::fabs(expect_normal([](double h) { return std::pow(std::max(h, 0.0), 2); }, r200) -
                    0.5) <= 1e-10);
    const double t = expect_normal(
        [](double h) { return std::pow(std::tanh(std::sqrt(2.5764) * h), 2); }, r200);
    CHECK(std::fabs(t - 0.5639) <= 5e-4);
  }

  TEST_CASE("kinked integrands need the composite rule") {
    // Gauss-Hermite converges only algebraically for |h|; a composite rule with a
    // panel edge at the kink reaches full accuracy.
    const double exact = std::sqrt(2.0 / std::numbers::pi);
    const auto gh = gauss_hermite_rule(200);
    const double gh_err = std::fabs(expect_normal([](double h) { return std::fabs(h); }, gh) - exact);
    CHECK(gh_err > 1e-6);
    CHECK(gh_err < 5e-3);

    const auto comp = composite_normal_rule();
    const double got = expect_normal([](double h) { return std::fabs(h); }, comp);
    CHECK(std::fabs(got - 0.7978845608) <= 1e-9);
    CHECK(std::fabs(got - exact) <= 1e-13);
  }

  TEST_CASE("composite rule invariants") {
    const auto r = composite_normal_rule();
    REQUIRE(r.size() == 2400u);
    double sum = 0.0, var = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(r.weights[i] > 0.0);
      CHECK(r.nodes[r.size() - 1 - i] == -r.nodes[i]);
      CHECK(r.weights[r.size() - 1 - i] == r.weights[i]);
      sum += r.weights[i];
      var += r.weights[i] * r.nodes[i] * r.nodes[i];
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
    CHECK(std::fabs(var - 1.0) <= 1e-10);
    CHECK_THROWS_AS(composite_normal_rule(3), InvalidArgument);
  }

  TEST_CASE("odd integrands vanish") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int order : {7, 40, 200}) {
      const auto r = gauss_hermite_rule(order);
      for (int rep = 0; rep < 20; ++rep) {
        const double a = coef(gen), b = coef(gen), c = coef(gen);
        const double v = expect_normal(
            [&](double h) { return a * h + b * std::tanh(c * h) + a * b * h * h * h / (1 + h * h); },
            r);
        CHECK(std::fabs(v) <= 1e-14);
      }
    }
  }

  TEST_CASE("non-finite integrand names the node") {
    const auto r = gauss_hermite_rule(4);
    try {
      expect_normal([](double h) { return h > 1.0 ? std::numeric_limits<double>::infinity() : h; }, r);
      FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
      CHECK(e.at() > 1.0);
      CHECK(std::string(e.what()).find("node 3") != std::string::npos);
    }
  }
}

TEST_SUITE("erfcx") {
  TEST_CASE("spot values") {
    CHECK(erfc_scaled(0.0) == 1.0);
    const double minus_one = std::exp(1.0) * std::erfc(-1.0);
    CHECK(std::fabs(erfc_scaled(-1.0) - minus_one) <= 1e-14 * minus_one);
    const double ten = static_cast<double>(erfcx_cf_positive(10.0L));
    CHECK(std::fabs(erfc_scaled(10.0) - ten) <= 1e-12 * ten);
  }

  TEST_CASE("matches the continued-fraction oracle on |x| <= 26") {
    for (double x = -26.0; x <= 26.0; x += 0.0137) {
      const double want = static_cast<double>(erfcx_oracle(x));
      const double got = erfc_scaled(x);
      CHECK_MESSAGE(std::fabs(got - want) <= 1e-12 * want, "x = " << x);
    }
    for (double x : {-26.0, -0.5, -0.46875, 0.46875, 0.5, 4.0, 26.0}) {
      const double want = static_cast<double>(erfcx_oracle(x));
      CHECK_MESSAGE(std::fabs(erfc_scaled(x) - want) <= 1e-12 * want, "x = " << x);
    }
  }

  TEST_CASE("consistent with erfc where both are representable") {
    for (double x = -5.0; x <= 5.0; x += 0.01) {
      const double direct = std::erfc(x);
      CHECK_MESSAGE(std::fabs(erfc_scaled(x) * std::exp(-x * x) - direct) <= 1e-12 * direct,
                    "x = " << x);
    }
  }

  TEST_CASE("bounded for large positive arguments") {
    CHECK(std::isfinite(erfc_scaled(1e6)));
    CHECK(erfc_scaled(1e6) == doctest::Approx(1.0 / (std::sqrt(std::numbers::pi) * 1e6)));
    CHECK(std::isfinite(erfc_scaled(1e300)));
  }
}

TEST_SUITE("log_half_erfc") {
  TEST_CASE("spot values") {
    CHECK(std::fabs(log_half_erfc(0.0) - (-0.6931471806)) <= 1e-10);
    CHECK(std::fabs(log_half_erfc(0.0) + std::numbers::ln2) <= 1e-15);
    CHECK(std::fabs(log_half_erfc(-10.0)) <= 1e-20);
    const long double oracle = logl(erfcl(5.0L) / 2.0L);
    CHECK(std::fabs(log_half_erfc(5.0) - static_cast<double>(oracle)) <= 1e-10);
    CHECK(log_half_erfc(5.0) ==
          doctest::Approx(-25.0 + std::log(erfc_scaled(5.0)) - std::numbers::ln2).epsilon(1e-15));
  }

  TEST_CASE("finite far into the tail") {
    const double v = log_half_erfc(26.0);
    CHECK(std::isfinite(v));
    const long double oracle = -676.0L + logl(erfcx_oracle(26.0L)) - logl(2.0L);
    CHECK(std::fabs(v - static_cast<double>(oracle)) <= 1e-12 * 676.0);
    CHECK(std::isfinite(log_half_erfc(1e3)));
  }

  TEST_CASE("definitional identity with erfcx") {
    for (double x = -6.0; x <= 26.0; x += 0.05) {
      const double lhs = log_half_erfc(x) + std::numbers::ln2 + x * x - std::log(erfc_scaled(x));
      CHECK_MESSAGE(std::fabs(lhs) <= 1e-13 * (1.0 + x * x), "x = " << x);
    }
  }

  TEST_CASE("extended precision oracle") {
    for (double x = -8.0; x <= 8.0; x += 0.125) {
      const long double oracle = logl(erfcl(static_cast<long double>(x)) / 2.0L);
      CHECK_MESSAGE(std::fabs(log_half_erfc(x) - static_cast<double>(oracle)) <=
                        1e-12 * (1.0 + std::fabs(static_cast<double>(oracle))),
                    "x = " << x);
    }
  }
}

TEST_CASE("log_two_cosh avoids overflow") {
  CHECK(log_two_cosh(0.0) == doctest::Approx(std::numbers::ln2));
  CHECK(log_two_cosh(1000.0) == doctest::Approx(1000.0));
  CHECK(log_two_cosh(-3.0) == doctest::Approx(std::log(2.0 * std::cosh(3.0))).epsilon(1e-15));
}
