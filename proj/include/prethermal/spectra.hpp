#pragma once

// Discrete Fourier analysis of step sequences, the exact Thue-Morse Riesz
// product, log-binned median envelopes, and envelope fits for the three
// suppression classes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "prethermal/arithmetic.hpp"
#include "prethermal/common.hpp"
#include "prethermal/drives.hpp"

namespace prethermal {

enum class Normalization { OneOverN, Unnormalized };

struct SpectrumEntry {
  double omega;                 // radians per step, in (0, 2 pi)
  std::complex<double> value;
};

struct Spectrum {
  std::vector<SpectrumEntry> entries;  // k = 1..N-1, omega strictly increasing
  Normalization normalization = Normalization::OneOverN;
  std::size_t n = 0;                   // sequence length
};

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n && (n & (n - 1)) == 0; }

inline void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  constexpr long double pi_l = 3.14159265358979323846264338327950288L;
  std::vector<std::complex<double>> twiddle(n / 2);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const long double ang = -2.0L * pi_l / static_cast<long double>(len);
    for (std::size_t k = 0; k < len / 2; ++k) {
      const long double a_k = ang * static_cast<long double>(k);
      twiddle[k] = {static_cast<double>(std::cos(a_k)), static_cast<double>(std::sin(a_k))};
    }
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * twiddle[k];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

// Direct transform for non-power-of-two lengths (Fibonacci numbers). Phasor
// resynced every 64 steps to keep the incremental rotation accurate.
inline std::vector<std::complex<double>> dft_direct(const std::vector<double>& s) {
  const std::size_t n = s.size();
  std::vector<std::complex<double>> out(n);
  parallel_for(n, [&](std::size_t k) {
    const double ang = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    const std::complex<double> step = std::polar(1.0, ang);
    std::complex<double> acc = 0.0, ph = 1.0;
    for (std::size_t m = 0; m < n; ++m) {
      if ((m & 63u) == 0) ph = std::polar(1.0, ang * static_cast<double>(m));
      acc += s[m] * ph;
      ph *= step;
    }
    out[k] = acc;
  });
  return out;
}

}  // namespace detail

// f(Omega_k) = (1/N) sum_m s~_m e^{-i Omega_k m}, Omega_k = 2 pi k / N,
// bins k = 1..N-1 retained (k = 0 excluded).
inline Spectrum dft(const std::vector<double>& series, bool subtract_mean) {
  const std::size_t n = series.size();
  if (n < 2) throw parameter_error("dft: length >= 2 required");
  std::vector<double> s = series;
  if (subtract_mean) {
    double mean = 0;
    for (double v : s) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : s) v -= mean;
  }
  std::vector<std::complex<double>> f;
  if (detail::is_power_of_two(n)) {
    std::vector<std::complex<double>> a(s.begin(), s.end());
    detail::fft_radix2(a);
    f = std::move(a);
  } else {
    f = detail::dft_direct(s);
  }
  Spectrum spec;
  spec.n = n;
  spec.normalization = Normalization::OneOverN;
  spec.entries.reserve(n - 1);
  for (std::size_t k = 1; k < n; ++k) {
    spec.entries.push_back({2.0 * kPi * static_cast<double>(k) / static_cast<double>(n),
                            f[k] / static_cast<double>(n)});
  }
  return spec;
}

inline Spectrum dft(const StepSequence& seq, bool subtract_mean) {
  std::vector<double> s(seq.values.begin(), seq.values.end());
  return dft(s, subtract_mean);
}

// Exact unnormalized Thue-Morse spectral value,
// f_r(Omega) = prod_{j<r} (1 - e^{-i 2^j Omega}); N dft(tm word) = f_r at the
// grid frequencies (same e^{-i} convention as the transform above).
inline std::complex<double> riesz_product(int r, double omega) {
  if (r < 1) throw parameter_error("riesz_product: r >= 1 required");
  // doubling the angle amplifies rounding by 2^j, so the factors are built in
  // long double (the 2^j scaling itself is exact)
  std::complex<long double> prod = 1.0L;
  for (int j = 0; j < r; ++j) {
    const long double a = std::ldexp(static_cast<long double>(omega), j);
    prod *= std::complex<long double>(1.0L - std::cos(a), std::sin(a));
  }
  return {static_cast<double>(prod.real()), static_cast<double>(prod.imag())};
}

// Grid-exact evaluation at Omega_k = 2 pi k / n: the doubled angles reduce
// modulo 2 pi in integer arithmetic, so no factor inherits amplified rounding.
inline std::complex<double> riesz_product(int r, std::size_t k, std::size_t n) {
  if (r < 1) throw parameter_error("riesz_product: r >= 1 required");
  if (n == 0 || k >= n) throw parameter_error("riesz_product: grid index out of range");
  constexpr long double two_pi = 6.28318530717958647692528676655900577L;
  std::complex<long double> prod = 1.0L;
  std::size_t kk = k;
  for (int j = 0; j < r; ++j) {
    const long double a = two_pi * static_cast<long double>(kk) / static_cast<long double>(n);
    prod *= std::complex<long double>(1.0L - std::cos(a), std::sin(a));
    kk = (2 * kk) % n;
  }
  return {static_cast<double>(prod.real()), static_cast<double>(prod.imag())};
}

// |f_r(Omega)| <= 2^{r(r-1)/2} |Omega|^r, from 2 sin(x/2) <= |x|.
inline double riesz_bound(int r, double omega) {
  if (r < 1) throw parameter_error("riesz_bound: r >= 1 required");
  return std::ldexp(std::pow(std::fabs(omega), r), r * (r - 1) / 2);
}

// ---------------------------------------------------------------------------
// Log-binned median envelopes.
// ---------------------------------------------------------------------------

struct EnvelopePoint {
  double omega_center;  // geometric mean of the bin edges
  double magnitude;     // median of in-bin |f|
};

struct BinSpec {
  double omega_max = 0;
  int bin_count = 0;
  std::vector<double> edges;  // log-spaced, bin_count + 1 entries
};

struct Envelope {
  std::vector<EnvelopePoint> points;
  BinSpec bin_spec;
};

inline constexpr double kDefaultOmegaMax = kPi / 8.0;
inline constexpr int kDefaultBinsPerDecade = 24;

inline int default_bin_count(double omega_min, double omega_max,
                             int per_decade = kDefaultBinsPerDecade) {
  const double decades = std::log10(omega_max / omega_min);
  return std::max(4, static_cast<int>(std::lround(per_decade * decades)));
}

// Median with the even-count convention: mean of the two middle values.
inline double median_inplace(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline Envelope binned_median_envelope(const Spectrum& spec, double omega_max, int bins) {
  if (!(omega_max > 0) || omega_max > kPi + 1e-12)
    throw parameter_error("binned_median_envelope: omega_max in (0, pi] required");
  if (bins < 4) throw parameter_error("binned_median_envelope: bins >= 4 required");
  double omega_lo = std::numeric_limits<double>::infinity();
  for (const auto& e : spec.entries)
    if (e.omega <= omega_max) omega_lo = std::min(omega_lo, e.omega);
  if (!std::isfinite(omega_lo))
    throw parameter_error("binned_median_envelope: no entries at or below omega_max");

  Envelope env;
  env.bin_spec.omega_max = omega_max;
  env.bin_spec.bin_count = bins;
  env.bin_spec.edges.resize(bins + 1);
  const double llo = std::log(omega_lo * (1.0 - 1e-12)), lhi = std::log(omega_max);
  for (int i = 0; i <= bins; ++i)
    env.bin_spec.edges[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / bins);

  std::vector<std::vector<double>> buckets(bins);
  for (const auto& e : spec.entries) {
    if (e.omega > omega_max) continue;
    const double t = (std::log(e.omega) - llo) / (lhi - llo);
    int i = static_cast<int>(t * bins);
    i = std::clamp(i, 0, bins - 1);
    buckets[i].push_back(std::abs(e.value));
  }
  for (int i = 0; i < bins; ++i) {
    if (buckets[i].empty()) continue;  // empty bins dropped
    env.points.push_back({std::sqrt(env.bin_spec.edges[i] * env.bin_spec.edges[i + 1]),
                          median_inplace(buckets[i])});
  }
  return env;
}

// Drops the lowest 10% of bins; used for random-signed sequences where the
// block-sign transform adds noise at the lowest frequencies.
inline Envelope drop_lowest_decile(Envelope env) {
  const std::size_t drop = env.points.size() / 10;
  env.points.erase(env.points.begin(), env.points.begin() + drop);
  return env;
}

// ---------------------------------------------------------------------------
// Envelope fits.
// ---------------------------------------------------------------------------

struct PowerLawFit {
  double slope;
  double intercept;  // ln M at ln Omega = 0
  double rms_residual;
};

// Ordinary least squares of ln M on ln Omega; zero magnitudes excluded.
inline PowerLawFit fit_power_law(const Envelope& env) {
  std::vector<double> x, y;
  for (const auto& pt : env.points) {
    if (pt.magnitude > 0) {
      x.push_back(std::log(pt.omega_center));
      y.push_back(std::log(pt.magnitude));
    }
  }
  const std::size_t n = x.size();
  if (n < 3) throw numerical_error("fit_power_law: fewer than 3 usable envelope points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw numerical_error("fit_power_law: degenerate abscissa");
  PowerLawFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

struct ClassFit {
  double b_hat;
  double rms_residual;
};

namespace detail {

// rms of ln M - (a - g_b(omega)) with the offset a at its optimum.
inline double class_fit_rms(const std::vector<double>& omega, const std::vector<double>& lnm,
                            const SuppressionClass& cls, double b) {
  const std::size_t n = omega.size();
  double a = 0;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (cls.kind) {
      case ClassKind::Poly: g[i] = -b * std::log(omega[i]); break;
      case ClassKind::Quasipoly: g[i] = std::pow(std::fabs(std::log(omega[i])), b); break;
      case ClassKind::StretchExpt: g[i] = std::pow(omega[i], -b); break;
    }
    a += lnm[i] + g[i];
  }
  a /= n;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = lnm[i] - (a - g[i]);
    ss += r * r;
  }
  return std::sqrt(ss / n);
}

}  // namespace detail

// One-parameter fit of the class exponent b in ln M = a - g_b(omega):
// Poly g = -b ln omega, Quasipoly g = |ln omega|^b, StretchExpt g = omega^-b.
// Coarse grid scan plus golden-section refinement.
inline ClassFit fit_suppression_class(const Envelope& env, const SuppressionClass& cls) {
  std::vector<double> omega, lnm;
  for (const auto& pt : env.points) {
    if (pt.magnitude > 0) {
      omega.push_back(pt.omega_center);
      lnm.push_back(std::log(pt.magnitude));
    }
  }
  if (omega.size() < 4) throw numerical_error("fit_suppression_class: fewer than 4 usable points");

  const double b_lo = 0.05, b_hi = 8.0;
  const int coarse = 320;
  double best_b = b_lo, best_r = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= coarse; ++i) {
    const double b = b_lo + (b_hi - b_lo) * static_cast<double>(i) / coarse;
    const double r = detail::class_fit_rms(omega, lnm, cls, b);
    if (r < best_r) {
      best_r = r;
      best_b = b;
    }
  }
  double lo = std::max(b_lo, best_b - (b_hi - b_lo) / coarse);
  double hi = std::min(b_hi, best_b + (b_hi - b_lo) / coarse);
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (detail::class_fit_rms(omega, lnm, cls, m1) < detail::class_fit_rms(omega, lnm, cls, m2))
      hi = m2;
    else
      lo = m1;
  }
  const double b = 0.5 * (lo + hi);
  const double r = detail::class_fit_rms(omega, lnm, cls, b);
  if (!std::isfinite(r)) throw numerical_error("fit_suppression_class: non-convergent search");
  return {b, r};
}

// Parseval check value: N sum |f_k|^2 over retained bins (OneOverN spectra of
// mean-subtracted data) should equal sum |s_m - mean|^2.
inline double parseval_lhs(const Spectrum& spec) {
  if (spec.normalization != Normalization::OneOverN)
    throw parameter_error("parseval_lhs: OneOverN normalization required");
  double s = 0;
  for (const auto& e : spec.entries) s += std::norm(e.value);
  return s * static_cast<double>(spec.n);
}

}  // namespace prethermal
