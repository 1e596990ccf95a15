#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "prethermal/drives.hpp"

using namespace prethermal;

namespace {
std::vector<int> vals(const StepSequence& s) {
  return std::vector<int>(s.values.begin(), s.values.end());
}
}  // namespace

TEST_CASE("thue-morse words") {
  CHECK(vals(thue_morse_word(0)) == std::vector<int>{1});
  CHECK(vals(thue_morse_word(1)) == std::vector<int>{1, -1});
  // 01101001 under 0 -> +1, 1 -> -1
  CHECK(vals(thue_morse_word(3)) == std::vector<int>{1, -1, -1, 1, -1, 1, 1, -1});
  CHECK(thue_morse_word(12).size() == std::size_t(1) << 12);
  CHECK(thue_morse_word(5).mean() == 0.0);
  CHECK_THROWS_AS(thue_morse_word(27), capacity_error);
}

TEST_CASE("thue-morse self-similarity") {
  for (int r = 1; r <= 10; ++r) {
    const auto w = thue_morse_word(r);
    const auto prev = thue_morse_word(r - 1);
    for (std::size_t m = 0; m < prev.size(); ++m) {
      REQUIRE(w.values[2 * m] == prev.values[m]);
      REQUIRE(w.values[2 * m + 1] == -prev.values[m]);
    }
  }
}

TEST_CASE("rmd sequences") {
  CHECK(vals(rmd_sequence(2, {1})) == std::vector<int>{1, -1, -1, 1});
  CHECK(vals(rmd_sequence(2, {1, -1})) == std::vector<int>{1, -1, -1, 1, -1, 1, 1, -1});
  CHECK(vals(rmd_sequence(0, {-1, -1})) == std::vector<int>{-1, -1});
  // single unsigned block reproduces the Thue-Morse word
  for (int r : {1, 3, 6}) CHECK(vals(rmd_sequence(r, {1})) == vals(thue_morse_word(r)));
  const auto signs = random_block_signs(64, 5);
  CHECK(rmd_sequence(3, signs).size() == 64u << 3);
  CHECK_THROWS_AS(rmd_sequence(2, {}), parameter_error);
  CHECK_THROWS_AS(rmd_sequence(2, {2}), parameter_error);
}

TEST_CASE("fibonacci words") {
  CHECK(vals(fibonacci_word(0)) == std::vector<int>{1});
  CHECK(vals(fibonacci_word(2)) == std::vector<int>{1, -1, 1});
  CHECK(vals(fibonacci_word(3)) == std::vector<int>{1, -1, 1, 1, -1});
  // |W_{n+1}| = |W_n| + |W_{n-1}|
  for (int n = 2; n <= 20; ++n)
    CHECK(fibonacci_word(n).size() ==
          fibonacci_word(n - 1).size() + fibonacci_word(n - 2).size());
  CHECK(fibonacci_word(20).size() == 17711u);
  CHECK_THROWS_AS(fibonacci_word(40), capacity_error);
}

TEST_CASE("factorial drive") {
  const auto d1 = factorial_drive(FactorialDecay::PolyB, 2.0, 1, 1.0);
  REQUIRE(d1.components.size() == 1);
  CHECK(d1.components[0].freq == 1.0);
  CHECK(d1.components[0].amp == 1.0);

  const auto d3 = factorial_drive(FactorialDecay::PolyB, 2.0, 3, 1.0);
  REQUIRE(d3.components.size() == 3);
  CHECK_THAT(d3.components[1].amp, Catch::Matchers::WithinRel(0.25, 1e-14));
  CHECK_THAT(d3.components[2].amp, Catch::Matchers::WithinRel(1.0 / 36.0, 1e-14));
  CHECK_THAT(d3.components[1].freq, Catch::Matchers::WithinRel(0.5, 1e-14));
  CHECK_THAT(d3.components[2].freq, Catch::Matchers::WithinRel(1.0 / 6.0, 1e-14));

  const auto ds = factorial_drive(FactorialDecay::StretchB, 1.0, 2, 1.0);
  CHECK_THAT(ds.components[0].amp, Catch::Matchers::WithinRel(std::exp(-1.0), 1e-14));
  CHECK_THAT(ds.components[1].amp, Catch::Matchers::WithinRel(std::exp(-2.0), 1e-14));

  // amplitudes strictly decreasing in k for all laws with b > 0 (b > 1 for poly)
  for (auto law : {FactorialDecay::PolyB, FactorialDecay::QuasipolyB, FactorialDecay::StretchB}) {
    const double b = law == FactorialDecay::PolyB ? 1.5 : 0.7;
    const auto d = factorial_drive(law, b, 8, 2.0);
    for (std::size_t i = 0; i + 1 < d.components.size(); ++i)
      REQUIRE(d.components[i + 1].amp < d.components[i].amp);
  }

  CHECK_THROWS_AS(factorial_drive(FactorialDecay::PolyB, 1.0, 3, 1.0), parameter_error);
  CHECK_THROWS_AS(factorial_drive(FactorialDecay::PolyB, 2.0, 25, 1.0), capacity_error);
}

TEST_CASE("quasi-floquet drive") {
  // single tone, 1/|n| decay
  const auto d = quasi_floquet_drive({1.0}, FourierDecay::PolyAlpha, 1.0, 2);
  REQUIRE(d.components.size() == 2);
  CHECK(d.components[0].amp == 1.0);
  CHECK(d.components[1].amp == 0.5);
  CHECK(d.components[0].freq == 1.0);
  CHECK(d.components[1].freq == 2.0);

  // (1, sqrt2), L1 cutoff 1: only +-(1,0) and +-(0,1); one component per pair
  const auto d2 = quasi_floquet_drive({1.0, std::sqrt(2.0)}, FourierDecay::ExpAlpha, 1.0, 1);
  REQUIRE(d2.components.size() == 2);
  for (const auto& c : d2.components) {
    CHECK_THAT(c.amp, Catch::Matchers::WithinRel(std::exp(-1.0), 1e-14));
    CHECK((std::fabs(c.freq - 1.0) < 1e-14 || std::fabs(c.freq - std::sqrt(2.0)) < 1e-14));
  }

  // two-tone hard-cutoff model of sin(lambda t) + sin(phi lambda t)
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const auto d3 = quasi_floquet_drive({1.0, phi}, FourierDecay::ExpAlpha, 50.0, 1);
  REQUIRE(d3.components.size() == 2);
  CHECK(d3.claimed_diophantine_gamma == 1.0);  // recorded, not verified
  CHECK(quasi_floquet_drive({1.0, phi}, FourierDecay::ExpAlpha, 1.0, 1, 1.2)
            .claimed_diophantine_gamma == 1.2);

  // labels are unique
  const auto d4 = quasi_floquet_drive({1.0, std::sqrt(2.0)}, FourierDecay::PolyAlpha, 1.0, 4);
  for (std::size_t i = 0; i < d4.components.size(); ++i)
    for (std::size_t j = i + 1; j < d4.components.size(); ++j)
      REQUIRE(d4.components[i].label.n() != d4.components[j].label.n());
}

TEST_CASE("sampling") {
  const auto d = factorial_drive(FactorialDecay::PolyB, 2.0, 2, 1.0);
  // all phases zero: V(0) = 0
  CHECK(sample(d, {0.0})[0] == 0.0);
  // sin(pi) + (1/4) sin(pi/2) = 1/4
  CHECK_THAT(sample(d, {kPi})[0], Catch::Matchers::WithinAbs(0.25, 1e-14));

  ContinuousDrive single;
  single.components.push_back({FrequencyLabel::int_vec({1}), 1.0, 2.0, 0.0});
  CHECK_THAT(sample(single, {kPi / 2.0})[0], Catch::Matchers::WithinAbs(2.0, 1e-14));
}
