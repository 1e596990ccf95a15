#pragma once

// Drive generators: Thue-Morse and random-multipolar step sequences, the
// Fibonacci substitution word, and the continuous Factorial / Quasi-Floquet
// component lists. Symbols map as 0 -> +1, 1 -> -1 (s = 1 - 2t).

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "prethermal/arithmetic.hpp"
#include "prethermal/common.hpp"

namespace prethermal {

// Length cap for generated sequences: 2^26 steps.
inline constexpr std::size_t kMaxSequenceLength = std::size_t(1) << 26;
inline constexpr int kMaxThueMorseDepth = 26;
inline constexpr int kMaxFibonacciIterations = 36;

struct StepSequence {
  std::vector<std::int8_t> values;  // each exactly +1 or -1
  double dt = 1.0;                  // step duration, 1/lambda
  std::string rule = "custom";      // thue_morse | rmd | fibonacci | custom
  int depth = 0;
  std::vector<std::int8_t> block_signs;

  std::size_t size() const { return values.size(); }
  double mean() const {
    if (values.empty()) return 0.0;
    long s = 0;
    for (auto v : values) s += v;
    return static_cast<double>(s) / static_cast<double>(values.size());
  }
};

// +-1 Thue-Morse word of length 2^depth, built by doubling: w -> w, -w.
inline StepSequence thue_morse_word(int depth, double dt = 1.0) {
  if (depth < 0) throw parameter_error("thue_morse_word: depth >= 0 required");
  if (depth > kMaxThueMorseDepth) throw capacity_error("thue_morse_word: depth over cap (26)");
  StepSequence seq;
  seq.rule = "thue_morse";
  seq.depth = depth;
  seq.dt = dt;
  seq.values.assign(1, 1);
  seq.values.reserve(std::size_t(1) << depth);
  for (int r = 0; r < depth; ++r) {
    const std::size_t n = seq.values.size();
    for (std::size_t i = 0; i < n; ++i) seq.values.push_back(static_cast<std::int8_t>(-seq.values[i]));
  }
  return seq;
}

// Concatenation of block-signed depth-r Thue-Morse blocks, length |signs| 2^r.
inline StepSequence rmd_sequence(int r, const std::vector<int>& block_signs, double dt = 1.0) {
  if (r < 0) throw parameter_error("rmd_sequence: r >= 0 required");
  if (block_signs.empty()) throw parameter_error("rmd_sequence: block_signs must be non-empty");
  const StepSequence block = thue_morse_word(r);
  const std::size_t total = block_signs.size() * block.size();
  if (total > kMaxSequenceLength) throw capacity_error("rmd_sequence: length over cap");
  StepSequence seq;
  seq.rule = "rmd";
  seq.depth = r;
  seq.dt = dt;
  seq.values.reserve(total);
  seq.block_signs.reserve(block_signs.size());
  for (int b : block_signs) {
    if (b != 1 && b != -1) throw parameter_error("rmd_sequence: block signs must be +-1");
    seq.block_signs.push_back(static_cast<std::int8_t>(b));
    for (auto v : block.values) seq.values.push_back(static_cast<std::int8_t>(b * v));
  }
  return seq;
}

inline std::vector<int> random_block_signs(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> s(count);
  for (auto& v : s) v = rng.next_sign();
  return s;
}

// Fibonacci word under 0 -> 01, 1 -> 0 (W_{n+1} = W_n W_{n-1}, W_0 = "0",
// W_1 = "01"), mapped to +-1. Mean subtraction is left to the spectral side.
inline StepSequence fibonacci_word(int iterations, double dt = 1.0) {
  if (iterations < 0) throw parameter_error("fibonacci_word: iterations >= 0 required");
  if (iterations > kMaxFibonacciIterations)
    throw capacity_error("fibonacci_word: iterations over cap (36)");
  StepSequence seq;
  seq.rule = "fibonacci";
  seq.depth = iterations;
  seq.dt = dt;
  std::vector<std::int8_t> prev{1};           // W_0 = "0"
  std::vector<std::int8_t> cur{1, -1};        // W_1 = "01"
  if (iterations == 0) {
    seq.values = prev;
    return seq;
  }
  for (int i = 1; i < iterations; ++i) {
    std::vector<std::int8_t> next;
    next.reserve(cur.size() + prev.size());
    next.insert(next.end(), cur.begin(), cur.end());
    next.insert(next.end(), prev.begin(), prev.end());
    prev = std::move(cur);
    cur = std::move(next);
  }
  seq.values = std::move(cur);
  return seq;
}

// ---------------------------------------------------------------------------
// Continuous drives: sparse frequency-component lists.
// ---------------------------------------------------------------------------

struct DriveComponent {
  FrequencyLabel label;
  double freq;   // physical frequency (may be negative for Quasi-Floquet pairs)
  double amp;    // >= 0
  double phase;  // radians; defaults to 0 throughout
};

struct ContinuousDrive {
  std::vector<DriveComponent> components;
  double lambda = 1.0;
  // Claimed Diophantine exponent of the tone vector; recorded, not proved
  // (rational independence is unverifiable in finite precision). Zero when
  // the notion does not apply.
  double claimed_diophantine_gamma = 0.0;
};

// Amplitude decay laws for the Factorial drive.
enum class FactorialDecay { PolyB, QuasipolyB, StretchB };

// Component k has physical frequency lambda / k! and amplitude per decay law.
inline ContinuousDrive factorial_drive(FactorialDecay law, double b, int k_max, double lambda) {
  if (k_max < 1) throw parameter_error("factorial_drive: k_max >= 1 required");
  if (k_max > kMaxFactorialDepth) throw capacity_error("factorial_drive: k_max over exact-integer cap (20)");
  if (!(lambda > 0)) throw parameter_error("factorial_drive: lambda > 0 required");
  // PolyB needs b > 1 so the infinite-time average exists; the others b > 0.
  if (law == FactorialDecay::PolyB ? !(b > 1) : !(b > 0))
    throw parameter_error("factorial_drive: decay exponent outside the class's valid range");
  ContinuousDrive d;
  d.lambda = lambda;
  for (int k = 1; k <= k_max; ++k) {
    const double kf = static_cast<double>(factorial_int(k));
    double amp = 0;
    switch (law) {
      case FactorialDecay::PolyB: amp = std::pow(kf, -b); break;
      case FactorialDecay::QuasipolyB: amp = std::exp(-std::pow(std::log(kf), b)); break;
      case FactorialDecay::StretchB: amp = std::exp(-std::pow(kf, b)); break;
    }
    DriveComponent c{FrequencyLabel::factorial(Rational(1, factorial_int(k))), lambda / kf, amp, 0.0};
    d.components.push_back(std::move(c));
  }
  return d;
}

// Fourier decay families for Quasi-Floquet drives (rates in |n|_1).
enum class FourierDecay { PolyAlpha, LogSq, ExpAlpha };

inline constexpr std::size_t kMaxDriveComponents = std::size_t(1) << 22;

// All components with 0 < |n|_1 <= n_max, one per +-n pair (first nonzero
// entry positive); frequency n.omega, amplitude per decay law. gamma is the
// caller's claimed Diophantine exponent (defaults to the almost-everywhere
// value m - 1; carried as provenance only).
inline ContinuousDrive quasi_floquet_drive(const std::vector<double>& omega, FourierDecay decay,
                                           double alpha, int n_max, double gamma = -1.0) {
  if (n_max < 1) throw parameter_error("quasi_floquet_drive: n_max >= 1 required");
  if (omega.empty()) throw parameter_error("quasi_floquet_drive: at least one tone required");
  const int m = static_cast<int>(omega.size());
  ContinuousDrive d;
  d.lambda = 1.0;
  d.claimed_diophantine_gamma = gamma >= 0 ? gamma : static_cast<double>(m - 1);

  std::vector<std::int64_t> n(m, 0);
  std::function<void(int, int)> rec = [&](int i, int budget) {
    if (i == m) {
      std::int64_t l1 = 0;
      int first_nonzero = 0;
      for (int j = 0; j < m; ++j) {
        l1 += n[j] < 0 ? -n[j] : n[j];
        if (first_nonzero == 0 && n[j] != 0) first_nonzero = n[j] > 0 ? 1 : -1;
      }
      if (l1 == 0 || first_nonzero < 0) return;  // canonical representative of the +-n pair
      double amp = 0;
      const double a = static_cast<double>(l1);
      switch (decay) {
        case FourierDecay::PolyAlpha: amp = std::pow(a, -alpha); break;
        case FourierDecay::LogSq: amp = std::exp(-std::pow(std::log(a), 2)); break;
        case FourierDecay::ExpAlpha: amp = std::exp(-std::pow(a, alpha)); break;
      }
      double freq = 0;
      for (int j = 0; j < m; ++j) freq += static_cast<double>(n[j]) * omega[j];
      if (d.components.size() >= kMaxDriveComponents)
        throw capacity_error("quasi_floquet_drive: component count over cap");
      d.components.push_back({FrequencyLabel::int_vec(n), freq, amp, 0.0});
      return;
    }
    for (int v = -budget; v <= budget; ++v) {
      n[i] = v;
      rec(i + 1, budget - (v < 0 ? -v : v));
    }
    n[i] = 0;
  };
  rec(0, n_max);
  return d;
}

// V(t) = sum_k amp_k sin(freq_k t + phase_k) on the grid.
inline std::vector<double> sample(const ContinuousDrive& drive, const std::vector<double>& t_grid) {
  std::vector<double> out(t_grid.size(), 0.0);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    double s = 0;
    for (const auto& c : drive.components) s += c.amp * std::sin(c.freq * t_grid[i] + c.phase);
    out[i] = s;
  }
  return out;
}

}  // namespace prethermal
