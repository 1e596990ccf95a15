#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "prethermal/arithmetic.hpp"

using namespace prethermal;

TEST_CASE("dyadic depth") {
  CHECK(dyadic_depth(Rational(1, 2)) == 1);
  CHECK(dyadic_depth(Rational(2, 4)) == 1);  // reduces to 1/2
  CHECK(dyadic_depth(Rational(3, 8)) == 3);
  CHECK(dyadic_depth(Rational(7, 1)) == 0);
  CHECK(dyadic_depth(Rational(0, 4)) == 0);
  CHECK_THROWS_AS(dyadic_depth(Rational(1, 3)), parameter_error);
  CHECK_THROWS_AS(dyadic_depth(Rational(1, 6)), parameter_error);
}

TEST_CASE("factorial depth") {
  CHECK(factorial_depth(Rational(7, 1)) == 1);
  CHECK(factorial_depth(Rational(1, 2)) == 2);
  CHECK(factorial_depth(Rational(1, 6)) == 3);
  CHECK(factorial_depth(Rational(1, 4)) == 4);   // 4 | 4! but not 3!
  CHECK(factorial_depth(Rational(1, 7)) == 7);
  CHECK(factorial_depth(Rational(5, 120)) == 4); // reduces to 1/24
  CHECK_THROWS_AS(factorial_depth(Rational(1, 2147483647)), capacity_error);
}

TEST_CASE("ultra-subadditivity of depths, exhaustive small range") {
  // dyadic: all pairs with depth <= 10 and odd numerators in a window
  std::vector<Rational> dyadics;
  for (int r = 0; r <= 10; ++r)
    for (std::int64_t k = -31; k <= 31; ++k) {
      if (r > 0 && k % 2 == 0) continue;
      dyadics.emplace_back(k, std::int64_t(1) << r);
    }
  for (const auto& a : dyadics)
    for (const auto& b : dyadics) {
      REQUIRE(dyadic_depth(a + b) <= std::max(dyadic_depth(a), dyadic_depth(b)));
    }

  // factorial: k <= 7 with a numerator window
  std::vector<Rational> facts;
  for (int k = 1; k <= 7; ++k)
    for (std::int64_t n = -8; n <= 8; ++n) facts.emplace_back(n, factorial_int(k));
  for (const auto& a : facts)
    for (const auto& b : facts) {
      const Rational s = a + b;
      if (s.is_zero()) continue;
      REQUIRE(factorial_depth(s) <= std::max(factorial_depth(a), factorial_depth(b)));
    }
}

TEST_CASE("label group closure and Omega map") {
  const auto l1 = FrequencyLabel::dyadic(Rational(1, 4));
  const auto l2 = FrequencyLabel::dyadic(Rational(1, 4));
  const auto sum = l1 + l2;
  CHECK(sum.depth() == 1);  // 1/4 + 1/4 = 1/2
  LabelContext ctx;
  ctx.lambda = 2.0;
  CHECK_THAT(sum.omega(ctx), Catch::Matchers::WithinRel(2.0 * kPi * 2.0 * 0.5, 1e-14));

  const auto v1 = FrequencyLabel::int_vec({1, -2});
  const auto v2 = FrequencyLabel::int_vec({0, 3});
  const auto vs = v1 + v2;
  CHECK(vs.l1_norm() == 2);
  ctx.omega_vec = {1.0, std::sqrt(2.0)};
  CHECK_THAT(vs.omega(ctx), Catch::Matchers::WithinRel(1.0 + std::sqrt(2.0), 1e-14));

  CHECK_THROWS_AS(l1 + v1, parameter_error);
}

TEST_CASE("penalty values") {
  // b ln(k!) at k = 3
  const auto lbl = FrequencyLabel::factorial(Rational(1, 6));
  CHECK_THAT(penalty_value(Penalty::factorial_b_log_fact(2.0), lbl),
             Catch::Matchers::WithinAbs(2.0 * std::log(6.0), 1e-12));

  // dyadic linear at depth 0
  CHECK(penalty_value(Penalty::dyadic_linear(), FrequencyLabel::dyadic(Rational(3, 1))) == 0.0);

  // shifted-log family: k_b = e^{b-1}/b, value at |n| = 1 is ln(1 + e/2)^2
  const double kb = std::exp(1.0) / 2.0;
  const double expected = std::pow(std::log(kb + 1.0), 2.0);
  CHECK_THAT(penalty_value(Penalty::qf_log_pow(2.0), FrequencyLabel::int_vec({1})),
             Catch::Matchers::WithinAbs(expected, 1e-12));
  CHECK_THAT(expected, Catch::Matchers::WithinAbs(0.73667, 1e-4));

  // zero labels cost nothing
  CHECK(penalty_value(Penalty::qf_log(), FrequencyLabel::int_vec({0, 0})) == 0.0);
  CHECK(penalty_value(Penalty::factorial_fact_pow(1.0), FrequencyLabel::factorial(Rational(0, 1))) == 0.0);

  // group mismatch
  CHECK_THROWS_AS(penalty_value(Penalty::qf_log(), lbl), parameter_error);
}

TEST_CASE("subadditivity checker") {
  // |n|^2 violated by n1 = n2 = (1): p(2) = 4 > 1 + 1
  {
    int calls = 0;
    auto pair_once = [&]() {
      ++calls;
      return std::make_pair(FrequencyLabel::int_vec({1}), FrequencyLabel::int_vec({1}));
    };
    const auto res = check_subadditivity(Penalty::qf_norm_alpha(2.0), pair_once, 10);
    REQUIRE_FALSE(res.holds);
    CHECK(calls == 1);
    CHECK(res.lhs == 4.0);
    CHECK(res.rhs == 2.0);
  }

  // ln(1+|n|): exhaustive over |n| <= 100 in 1-D
  {
    std::vector<std::pair<FrequencyLabel, FrequencyLabel>> pairs;
    for (int a = -100; a <= 100; ++a)
      for (int b = -100; b <= 100; ++b)
        pairs.emplace_back(FrequencyLabel::int_vec({a}), FrequencyLabel::int_vec({b}));
    std::size_t i = 0;
    auto src = [&]() { return pairs[i++]; };
    CHECK(check_subadditivity(Penalty::qf_log(), src, static_cast<long>(pairs.size())).holds);
  }

  // dyadic square over random pairs
  {
    DyadicPairSource src(42, 10, 1000);
    CHECK(check_subadditivity(Penalty::dyadic_square(), src, 100000).holds);
  }

  // alpha = 2 random suite finds a violation within 10 trials at this seed
  {
    IntVecPairSource src(7, 2, 5);
    CHECK_FALSE(check_subadditivity(Penalty::qf_norm_alpha(2.0), src, 10).holds);
  }

  // alpha <= 1 holds on a large random suite
  {
    IntVecPairSource src(11, 3, 50);
    CHECK(check_subadditivity(Penalty::qf_norm_alpha(1.0), src, 100000).holds);
    IntVecPairSource src2(13, 3, 50);
    CHECK(check_subadditivity(Penalty::qf_norm_alpha(0.5), src2, 100000).holds);
  }

  // any nondecreasing p of an ultra-subadditive depth passes
  {
    FactorialPairSource src(17, 7, 40);
    CHECK(check_subadditivity(Penalty::factorial_log_fact_pow(2.0), src, 100000).holds);
    FactorialPairSource src2(19, 6, 40);
    CHECK(check_subadditivity(Penalty::factorial_fact_pow(1.0), src2, 50000).holds);
    DyadicPairSource src3(23, 10, 400);
    CHECK(check_subadditivity(Penalty::dyadic_linear(), src3, 100000).holds);
  }
}

TEST_CASE("small divisor closed forms") {
  CHECK(small_divisor_h(SuppressionClass::poly(3), 1.0 / 3.0) == 1.0);
  CHECK(std::isinf(small_divisor_h(SuppressionClass::poly(3), 0.2)));
  CHECK_THAT(small_divisor_h(SuppressionClass::quasipoly(2), 1.0),
             Catch::Matchers::WithinAbs(std::exp(0.25), 1e-12));
  CHECK_THAT(small_divisor_h(SuppressionClass::stretch_expt(1), 0.5),
             Catch::Matchers::WithinAbs(std::exp(-1.0) / 0.5, 1e-12));
  CHECK_THROWS_AS(small_divisor_h(SuppressionClass::poly(2), 0.0), parameter_error);
}

TEST_CASE("small divisor sup oracle agrees with closed forms") {
  const auto grid = log_grid(1e-7, 10.0, 8000);
  for (const auto& cls : {SuppressionClass::quasipoly(2), SuppressionClass::quasipoly(3),
                          SuppressionClass::stretch_expt(1), SuppressionClass::stretch_expt(2)}) {
    for (double dk = 0.05; dk <= 1.0; dk += 0.05) {
      const double h = small_divisor_h(cls, dk);
      const double oracle = small_divisor_sup_oracle(cls, dk, grid);
      INFO(cls.name() << " b=" << cls.b << " dk=" << dk);
      CHECK(std::fabs(oracle - h) <= 0.05 * h);
    }
  }
}

TEST_CASE("poly sup oracle diverges below the minimum gap") {
  const auto cls = SuppressionClass::poly(2);
  // at dk = 1/b the oracle stays bounded as the grid extends to zero
  double prev = small_divisor_sup_oracle(cls, 0.5, log_grid(1e-3, 1.0, 500));
  for (double eps : {1e-6, 1e-9}) {
    const double cur = small_divisor_sup_oracle(cls, 0.5, log_grid(eps, 1.0, 500));
    CHECK(cur <= prev * (1 + 1e-9));
    CHECK(cur <= 1.0 + 1e-9);
    prev = cur;
  }
  // below the gap it blows up as the grid extends toward zero
  double last = 0;
  for (double eps : {1e-3, 1e-6, 1e-9}) {
    const double cur = small_divisor_sup_oracle(cls, 0.3, log_grid(eps, 1.0, 500));
    CHECK(cur > 10.0 * last);
    last = cur;
  }
}

TEST_CASE("diophantine margin") {
  CHECK_THAT(diophantine_margin({1.0}, 1.0, 10), Catch::Matchers::WithinAbs(1.0, 1e-14));
  CHECK_THAT(diophantine_margin({1.0, 2.0}, 1.0, 2), Catch::Matchers::WithinAbs(0.0, 1e-14));
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double m = diophantine_margin({1.0, phi}, 1.0, 50);
  CHECK(m > 0.0);
  // decreasing in n_max
  CHECK(diophantine_margin({1.0, phi}, 1.0, 80) <= m + 1e-15);
}

TEST_CASE("class invariants") {
  for (const auto& cls : {SuppressionClass::poly(2), SuppressionClass::quasipoly(2),
                          SuppressionClass::stretch_expt(1)}) {
    for (double x : {0.01, 0.3, 0.9}) {
      CHECK_THAT(cls.f(x), Catch::Matchers::WithinRel(std::exp(-cls.p(x)), 1e-13));
    }
  }
  CHECK(SuppressionClass::poly(4).min_gap() == 0.25);
  CHECK(SuppressionClass::quasipoly(2).min_gap() == 0.0);
  CHECK(SuppressionClass::stretch_expt(2).min_gap() == 0.0);
  CHECK_THROWS_AS(SuppressionClass::quasipoly(1.0), parameter_error);
}
