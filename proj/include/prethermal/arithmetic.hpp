#pragma once

// Frequency-label groups (integer vectors, dyadic rationals, factorial
// rationals), their depth functions, resonance penalties, subadditivity
// checking, and the per-class small-divisor functions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "prethermal/common.hpp"

namespace prethermal {

// ---------------------------------------------------------------------------
// Exact rational arithmetic on int64 with overflow detection. Depth functions
// must be exact; floating point would mis-reduce.
// ---------------------------------------------------------------------------

class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw parameter_error("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num_ = g ? num / g : num;
    den_ = g ? den / g : den;
  }
  static Rational integer(std::int64_t n) { return Rational(n, 1); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator+(const Rational& o) const {
    const __int128 n = static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_;
    const __int128 d = static_cast<__int128>(den_) * o.den_;
    return from_wide(n, d);
  }
  Rational operator-() const { return Rational(-num_, den_); }
  Rational operator-(const Rational& o) const { return *this + (-o); }
  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static Rational from_wide(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a) {
      n /= a;
      d /= a;
    }
    const __int128 lim = std::numeric_limits<std::int64_t>::max();
    if (n > lim || -n > lim || d > lim) throw capacity_error("Rational: 64-bit overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }
  std::int64_t num_, den_;
};

// Largest k with k! representable in int64; depths beyond raise capacity_error.
inline constexpr int kMaxFactorialDepth = 20;

inline std::int64_t factorial_int(int k) {
  if (k < 0 || k > kMaxFactorialDepth) throw capacity_error("factorial_int: k out of range");
  std::int64_t f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// d(mu) = min{r >= 0 : 2^r mu integer}. Domain error if mu is not dyadic.
inline int dyadic_depth(const Rational& mu) {
  std::int64_t d = mu.den();
  int r = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++r;
  }
  if (d != 1) throw parameter_error("dyadic_depth: " + mu.str() + " is not a dyadic rational");
  return r;
}

// l(mu) = min{k >= 1 : k! mu integer}. Every rational qualifies eventually;
// beyond k = 20 the exact integers overflow and we raise capacity_error.
inline int factorial_depth(const Rational& mu) {
  std::int64_t d = mu.den();
  for (int k = 1; k <= kMaxFactorialDepth; ++k) {
    d /= std::gcd(d, static_cast<std::int64_t>(k));
    if (d == 1) return k;
  }
  throw capacity_error("factorial_depth: denominator needs k > 20");
}

// ---------------------------------------------------------------------------
// Frequency labels: one additive group per drive family.
// ---------------------------------------------------------------------------

enum class LabelKind { IntVec, Dyadic, Factorial };

// Evaluation context for Omega(label): the Quasi-Floquet tone vector and the
// drive speed used by the rational groups (Omega = 2 pi lambda mu).
struct LabelContext {
  std::vector<double> omega_vec;
  double lambda = 1.0;
};

class FrequencyLabel {
 public:
  static FrequencyLabel int_vec(std::vector<std::int64_t> n) {
    FrequencyLabel l;
    l.kind_ = LabelKind::IntVec;
    l.n_ = std::move(n);
    return l;
  }
  static FrequencyLabel dyadic(const Rational& mu) {
    FrequencyLabel l;
    l.kind_ = LabelKind::Dyadic;
    l.mu_ = mu;
    l.depth_ = dyadic_depth(mu);
    return l;
  }
  static FrequencyLabel factorial(const Rational& mu) {
    FrequencyLabel l;
    l.kind_ = LabelKind::Factorial;
    l.mu_ = mu;
    l.depth_ = mu.is_zero() ? 1 : factorial_depth(mu);
    return l;
  }

  LabelKind kind() const { return kind_; }
  const std::vector<std::int64_t>& n() const { return n_; }
  const Rational& mu() const { return mu_; }
  int depth() const { return depth_; }

  std::int64_t l1_norm() const {
    std::int64_t s = 0;
    for (auto v : n_) s += v < 0 ? -v : v;
    return s;
  }

  // Group addition; closed within each variant.
  FrequencyLabel operator+(const FrequencyLabel& o) const {
    if (kind_ != o.kind_) throw parameter_error("FrequencyLabel: cannot add across label groups");
    switch (kind_) {
      case LabelKind::IntVec: {
        if (n_.size() != o.n_.size())
          throw parameter_error("FrequencyLabel: dimension mismatch");
        std::vector<std::int64_t> s(n_.size());
        for (std::size_t i = 0; i < n_.size(); ++i) s[i] = n_[i] + o.n_[i];
        return int_vec(std::move(s));
      }
      case LabelKind::Dyadic:
        return dyadic(mu_ + o.mu_);
      case LabelKind::Factorial:
        return factorial(mu_ + o.mu_);
    }
    throw parameter_error("FrequencyLabel: bad kind");
  }

  double omega(const LabelContext& ctx) const {
    switch (kind_) {
      case LabelKind::IntVec: {
        if (n_.size() != ctx.omega_vec.size())
          throw parameter_error("FrequencyLabel::omega: tone vector dimension mismatch");
        double s = 0;
        for (std::size_t i = 0; i < n_.size(); ++i)
          s += static_cast<double>(n_[i]) * ctx.omega_vec[i];
        return s;
      }
      case LabelKind::Dyadic:
      case LabelKind::Factorial:
        return 2.0 * kPi * ctx.lambda * mu_.to_double();
    }
    throw parameter_error("FrequencyLabel: bad kind");
  }

  std::string str() const {
    switch (kind_) {
      case LabelKind::IntVec: {
        std::ostringstream os;
        os << "(";
        for (std::size_t i = 0; i < n_.size(); ++i) os << (i ? " " : "") << n_[i];
        os << ")";
        return os.str();
      }
      case LabelKind::Dyadic:
        return mu_.str();
      case LabelKind::Factorial:
        return mu_.str();
    }
    return "?";
  }

 private:
  LabelKind kind_ = LabelKind::IntVec;
  std::vector<std::int64_t> n_;
  Rational mu_;
  int depth_ = 0;
};

// ---------------------------------------------------------------------------
// Resonance penalties p(label) >= 0, one family per label group.
// Integer-vector penalties use the L1 norm, matching the Paley-Wiener bound.
// ---------------------------------------------------------------------------

enum class PenaltyFamily {
  QfLog,                // ln(1 + |n|)
  QfLogPowB,            // [ln(k_b + |n|)]^b, k_b = e^{b-1}/b
  QfNormAlpha,          // |n|^alpha (subadditive only for alpha <= 1)
  DyadicLinear,         // d
  DyadicSquare,         // d^2
  FactorialBLogFact,    // b ln(k!)
  FactorialLogFactPowB, // (ln k!)^b
  FactorialFactPowB,    // (k!)^b
};

// Alternative route to the quasipolynomial QF penalty: keep p = (ln|n|)^b and
// absorb triangle-inequality violations into the cluster prefactor via
// c = inf_m (1 - ln m / m) = 1 - ln 3 / 3. Not used by the shifted-log
// default; kept as a named constant.
inline constexpr double kClusterSlackConstant = 0.63379123629723428;

struct Penalty {
  PenaltyFamily family;
  double b = 0.0;  // exponent b or alpha, where the family has one

  static Penalty qf_log() { return {PenaltyFamily::QfLog, 0.0}; }
  static Penalty qf_log_pow(double b) { return {PenaltyFamily::QfLogPowB, b}; }
  static Penalty qf_norm_alpha(double a) { return {PenaltyFamily::QfNormAlpha, a}; }
  static Penalty dyadic_linear() { return {PenaltyFamily::DyadicLinear, 0.0}; }
  static Penalty dyadic_square() { return {PenaltyFamily::DyadicSquare, 0.0}; }
  static Penalty factorial_b_log_fact(double b) { return {PenaltyFamily::FactorialBLogFact, b}; }
  static Penalty factorial_log_fact_pow(double b) { return {PenaltyFamily::FactorialLogFactPowB, b}; }
  static Penalty factorial_fact_pow(double b) { return {PenaltyFamily::FactorialFactPowB, b}; }

  double shift_kb() const { return std::exp(b - 1.0) / b; }

  LabelKind group() const {
    switch (family) {
      case PenaltyFamily::QfLog:
      case PenaltyFamily::QfLogPowB:
      case PenaltyFamily::QfNormAlpha:
        return LabelKind::IntVec;
      case PenaltyFamily::DyadicLinear:
      case PenaltyFamily::DyadicSquare:
        return LabelKind::Dyadic;
      default:
        return LabelKind::Factorial;
    }
  }

  std::string name() const {
    switch (family) {
      case PenaltyFamily::QfLog: return "qf_log";
      case PenaltyFamily::QfLogPowB: return "qf_log_pow_b";
      case PenaltyFamily::QfNormAlpha: return "qf_norm_alpha";
      case PenaltyFamily::DyadicLinear: return "dyadic_linear";
      case PenaltyFamily::DyadicSquare: return "dyadic_square";
      case PenaltyFamily::FactorialBLogFact: return "factorial_b_log_fact";
      case PenaltyFamily::FactorialLogFactPowB: return "factorial_log_fact_pow_b";
      case PenaltyFamily::FactorialFactPowB: return "factorial_fact_pow_b";
    }
    return "?";
  }
};

inline double penalty_value(const Penalty& p, const FrequencyLabel& label) {
  if (label.kind() != p.group())
    throw parameter_error("penalty_value: label group does not match penalty family " + p.name());
  switch (p.family) {
    case PenaltyFamily::QfLog:
      return std::log(1.0 + static_cast<double>(label.l1_norm()));
    case PenaltyFamily::QfLogPowB: {
      // zero label sits in ker(Omega); the norm sums exclude it
      const std::int64_t n1 = label.l1_norm();
      if (n1 == 0) return 0.0;
      return std::pow(std::log(p.shift_kb() + static_cast<double>(n1)), p.b);
    }
    case PenaltyFamily::QfNormAlpha:
      return std::pow(static_cast<double>(label.l1_norm()), p.b);
    case PenaltyFamily::DyadicLinear:
      return label.mu().is_zero() ? 0.0 : static_cast<double>(label.depth());
    case PenaltyFamily::DyadicSquare: {
      if (label.mu().is_zero()) return 0.0;
      const double d = static_cast<double>(label.depth());
      return d * d;
    }
    case PenaltyFamily::FactorialBLogFact:
      if (label.mu().is_zero()) return 0.0;
      return p.b * std::lgamma(static_cast<double>(label.depth()) + 1.0);
    case PenaltyFamily::FactorialLogFactPowB:
      if (label.mu().is_zero()) return 0.0;
      return std::pow(std::lgamma(static_cast<double>(label.depth()) + 1.0), p.b);
    case PenaltyFamily::FactorialFactPowB:
      if (label.mu().is_zero()) return 0.0;
      return std::pow(static_cast<double>(factorial_int(label.depth())), p.b);
  }
  throw parameter_error("penalty_value: bad family");
}

// ---------------------------------------------------------------------------
// Subadditivity checking: first violating pair, or Holds after all trials.
// ---------------------------------------------------------------------------

struct SubadditivityResult {
  bool holds = true;
  FrequencyLabel label1, label2;
  double lhs = 0.0, rhs = 0.0;
};

inline constexpr double kSubadditivityTol = 1e-12;

template <class PairSource>
SubadditivityResult check_subadditivity(const Penalty& p, PairSource&& sampler, long trials) {
  if (trials < 1) throw parameter_error("check_subadditivity: trials >= 1 required");
  for (long t = 0; t < trials; ++t) {
    auto [l1, l2] = sampler();
    const double lhs = penalty_value(p, l1 + l2);
    const double rhs = penalty_value(p, l1) + penalty_value(p, l2);
    if (lhs > rhs + kSubadditivityTol) return {false, l1, l2, lhs, rhs};
  }
  return {};
}

// Prefab pair sources. All deterministic given the seed.
struct IntVecPairSource {
  Rng rng;
  int dim;
  std::int64_t max_abs;
  IntVecPairSource(std::uint64_t seed, int dim_, std::int64_t max_abs_)
      : rng(seed), dim(dim_), max_abs(max_abs_) {}
  std::pair<FrequencyLabel, FrequencyLabel> operator()() {
    auto draw = [&] {
      std::vector<std::int64_t> n(dim);
      bool all_zero = true;
      do {
        all_zero = true;
        for (auto& v : n) {
          v = rng.next_int(-max_abs, max_abs);
          all_zero = all_zero && v == 0;
        }
      } while (all_zero);
      return FrequencyLabel::int_vec(n);
    };
    return {draw(), draw()};
  }
};

struct DyadicPairSource {
  Rng rng;
  int max_depth;
  std::int64_t max_num;
  DyadicPairSource(std::uint64_t seed, int max_depth_, std::int64_t max_num_)
      : rng(seed), max_depth(max_depth_), max_num(max_num_) {}
  std::pair<FrequencyLabel, FrequencyLabel> operator()() {
    auto draw = [&] {
      const int r = static_cast<int>(rng.next_int(0, max_depth));
      std::int64_t num = rng.next_int(-max_num, max_num);
      return FrequencyLabel::dyadic(Rational(num, std::int64_t(1) << r));
    };
    return {draw(), draw()};
  }
};

struct FactorialPairSource {
  Rng rng;
  int max_k;
  std::int64_t max_num;
  FactorialPairSource(std::uint64_t seed, int max_k_, std::int64_t max_num_)
      : rng(seed), max_k(max_k_), max_num(max_num_) {}
  std::pair<FrequencyLabel, FrequencyLabel> operator()() {
    auto draw = [&] {
      const int k = static_cast<int>(rng.next_int(1, max_k));
      std::int64_t num = rng.next_int(-max_num, max_num);
      return FrequencyLabel::factorial(Rational(num, factorial_int(k)));
    };
    return {draw(), draw()};
  }
};

// ---------------------------------------------------------------------------
// Suppression classes and small-divisor functions.
// ---------------------------------------------------------------------------

enum class ClassKind { Poly, Quasipoly, StretchExpt };

// One universality class: suppression law f, penalty p = -ln f, small-divisor
// function h, and the smallest admissible decay gap.
struct SuppressionClass {
  ClassKind kind;
  double b;

  static SuppressionClass poly(double b) {
    if (b < 0) throw parameter_error("SuppressionClass::poly: b >= 0 required");
    return {ClassKind::Poly, b};
  }
  static SuppressionClass quasipoly(double b) {
    if (b <= 1) throw parameter_error("SuppressionClass::quasipoly: b > 1 required");
    return {ClassKind::Quasipoly, b};
  }
  static SuppressionClass stretch_expt(double b) {
    if (b <= 0) throw parameter_error("SuppressionClass::stretch_expt: b > 0 required");
    return {ClassKind::StretchExpt, b};
  }

  // p(x) = -ln f(x) for x > 0 (per-class scaled frequency x = Omega/lambda).
  double p(double x) const {
    switch (kind) {
      case ClassKind::Poly:
        return -b * std::log(x);
      case ClassKind::Quasipoly:
        return std::pow(std::fabs(std::log(x)), b);
      case ClassKind::StretchExpt:
        return std::pow(x, -b);
    }
    return 0.0;
  }
  double f(double x) const { return std::exp(-p(x)); }

  double min_gap() const { return kind == ClassKind::Poly ? 1.0 / b : 0.0; }

  // Constant in the closed-form small divisor function.
  double small_divisor_constant() const {
    switch (kind) {
      case ClassKind::Poly:
        return 1.0;
      case ClassKind::Quasipoly:
        return (b - 1.0) / std::pow(b, b / (b - 1.0));
      case ClassKind::StretchExpt:
        return std::pow(1.0 / (b * std::exp(1.0)), 1.0 / b);
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind) {
      case ClassKind::Poly: return "poly";
      case ClassKind::Quasipoly: return "quasipoly";
      case ClassKind::StretchExpt: return "stretch";
    }
    return "?";
  }
};

inline SuppressionClass class_from_name(const std::string& s, double b) {
  if (s == "poly") return SuppressionClass::poly(b);
  if (s == "quasipoly") return SuppressionClass::quasipoly(b);
  if (s == "stretch" || s == "stretch_expt") return SuppressionClass::stretch_expt(b);
  throw parameter_error("unknown suppression class: " + s);
}

// h(dk) = sup_x e^{-dk p(x)} / x at unit drive speed. Poly has a sharp
// threshold: finite (and equal to 1) only for dk >= 1/b.
inline double small_divisor_h(const SuppressionClass& cls, double delta_kappa) {
  if (!(delta_kappa > 0)) throw parameter_error("small_divisor_h: delta_kappa > 0 required");
  const double c = cls.small_divisor_constant();
  switch (cls.kind) {
    case ClassKind::Poly:
      if (cls.b > 0 && delta_kappa < 1.0 / cls.b - 1e-12)
        return std::numeric_limits<double>::infinity();
      return 1.0;
    case ClassKind::Quasipoly:
      return std::exp(c / std::pow(delta_kappa, 1.0 / (cls.b - 1.0)));
    case ClassKind::StretchExpt:
      return c / std::pow(delta_kappa, 1.0 / cls.b);
  }
  return 0.0;
}

// Brute-force maximum of e^{-dk p(x)} / x over a caller grid; the independent
// oracle for small_divisor_h.
inline double small_divisor_sup_oracle(const SuppressionClass& cls, double delta_kappa,
                                       const std::vector<double>& grid) {
  if (grid.empty()) throw parameter_error("small_divisor_sup_oracle: empty grid");
  double best = 0.0;
  for (double x : grid) {
    if (!(x > 0)) throw parameter_error("small_divisor_sup_oracle: grid values must be positive");
    best = std::max(best, std::exp(-delta_kappa * cls.p(x)) / x);
  }
  return best;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / (n - 1));
  return g;
}

// ---------------------------------------------------------------------------
// Empirical Diophantine margin: min over the box 0 < max_j |n_j| <= n_max of
// |n.omega| |n|_1^gamma / |omega|_2. Zero signals an exact resonance.
// ---------------------------------------------------------------------------

inline double diophantine_margin(const std::vector<double>& omega, double gamma, int n_max) {
  if (n_max < 1) throw parameter_error("diophantine_margin: n_max >= 1 required");
  double onorm = 0.0;
  for (double w : omega) onorm += w * w;
  onorm = std::sqrt(onorm);
  if (!(onorm > 0)) throw parameter_error("diophantine_margin: omega must be nonzero");

  const int m = static_cast<int>(omega.size());
  std::vector<std::int64_t> n(m, 0);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int)> rec = [&](int i) {
    if (i == m) {
      std::int64_t l1 = 0;
      double dot = 0;
      for (int j = 0; j < m; ++j) {
        l1 += n[j] < 0 ? -n[j] : n[j];
        dot += static_cast<double>(n[j]) * omega[j];
      }
      if (l1 == 0) return;
      const double margin = std::fabs(dot) * std::pow(static_cast<double>(l1), gamma) / onorm;
      best = std::min(best, margin);
      return;
    }
    for (int v = -n_max; v <= n_max; ++v) {
      n[i] = v;
      rec(i + 1);
    }
    n[i] = 0;
  };
  rec(0);
  return best;
}

}  // namespace prethermal
