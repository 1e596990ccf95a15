#pragma once

// kappa-sequence renormalization plans for the three suppression classes and
// the non-perturbative ln tau* bounds they imply. All tau* arithmetic stays in
// log space; the interesting regimes overflow doubles otherwise.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "prethermal/arithmetic.hpp"
#include "prethermal/common.hpp"

namespace prethermal {

// Principal-branch Lambert W by Newton with Halley fallback; x >= 0 here.
inline double lambert_w(double x) {
  if (!(x >= 0)) throw parameter_error("lambert_w: nonnegative argument required");
  if (x == 0) return 0.0;
  double w = x > std::exp(1.0) ? std::log(x) - std::log(std::log(x)) : x / (1.0 + x);
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    double step = f / (ew * (w + 1.0));
    if (!std::isfinite(step)) {  // Halley near w = -1 (not reached for x >= 0)
      step = f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0));
    }
    const double next = w - step;
    if (std::fabs(next - w) <= 1e-12 * std::max(1.0, std::fabs(next))) {
      w = next;
      const double resid = std::fabs(w * std::exp(w) - x) / std::max(x, 1e-300);
      if (resid > 1e-10) throw numerical_error("lambert_w: residual too large");
      return w;
    }
    w = next;
  }
  throw numerical_error("lambert_w: Newton did not converge");
}

struct KappaPlan {
  SuppressionClass cls;
  double kappa0 = 1.0, J = 1.0, lambda = 1.0;
  std::vector<double> kappa_seq;        // kappa_0 .. kappa_{q*}
  std::vector<double> kappa_prime_seq;  // interleaved kappa'_q where the class uses them
  int q_star = 0;
  double lambda_min = 0;  // validity threshold in units of J
  bool valid = false;
  std::map<std::string, double> constants;
  std::vector<double> r_bounds;  // per-step contraction bounds r_q

  KappaPlan(SuppressionClass c) : cls(c) {}
};

// ---------------------------------------------------------------------------
// Polynomial class: kappa'_q = 1 - (q+1)/b - q/(2b^2), eps = 1/(2b^2),
// q* = b - 1, threshold lambda >= 1152 b^3 J, per-step bound 576 b^3 J/lambda.
// The ladder is stated at kappa0 = 1 and scaled by kappa0.
// ---------------------------------------------------------------------------

inline KappaPlan plan_poly(int b, double kappa0, double J, double lambda) {
  if (b < 2) throw parameter_error("plan_poly: integer b >= 2 required");
  if (!(kappa0 > 0) || !(J > 0) || !(lambda > 0))
    throw parameter_error("plan_poly: positive kappa0, J, lambda required");
  KappaPlan plan(SuppressionClass::poly(static_cast<double>(b)));
  plan.kappa0 = kappa0;
  plan.J = J;
  plan.lambda = lambda;
  const double bd = static_cast<double>(b);
  const double eps = 1.0 / (2.0 * bd * bd);
  plan.q_star = b - 1;
  plan.lambda_min = 1152.0 * bd * bd * bd * J;
  plan.valid = lambda >= plan.lambda_min;
  plan.constants["eps"] = eps;
  plan.constants["C"] = 1152.0 * bd * bd * bd;
  plan.constants["C_prime"] = bd * bd;

  plan.kappa_seq.push_back(kappa0);
  for (int q = 0; q < plan.q_star; ++q) {
    const double qd = static_cast<double>(q);
    plan.kappa_prime_seq.push_back(kappa0 * (1.0 - (qd + 1.0) / bd - qd * eps));
    plan.kappa_seq.push_back(kappa0 * (1.0 - (qd + 1.0) / bd - (qd + 1.0) * eps));
  }
  const double r = 576.0 * bd * bd * bd * J / lambda;
  plan.r_bounds.assign(plan.q_star, r);
  return plan;
}

// ---------------------------------------------------------------------------
// Stretched-exponential class: reference curve
//   kappa_q = [kappa_1^mu - (1/mu)(c'' J/lambda)^{b/(b+1)} (q-1)]^{1/mu},
// mu = (2b+1)/(b+1), kappa_1 = kappa0/2, iteration stopped at kappa0/4. The
// free constant c defaults to 144 (the combined cluster-expansion prefactor
// scale) and is exposed as a parameter.
//
// Differentiating the curve gives the unit-step gap
//   delta_q >= -dkappa/dq = (1/mu^2)(c'' J/lambda)^{b/(b+1)} kappa^{1-mu},
// and (mu-1)(b+1)/b = 1, so the per-step bound evaluates on-curve to
//   r_q <= c J / (lambda kappa_{q+1} delta_q^{(b+1)/b})
//       <= (2c mu^{2(b+1)/b} / c'') (kappa_q / kappa_{q+1}) / 2.
// Choosing c'' = 2^{1/mu} 2c mu^{2(b+1)/b} together with the ratio guard
// (kappa_{q+1}/kappa_q)^mu >= 1/2 pins r_q <= 1/2 at every step.
// ---------------------------------------------------------------------------

inline double stretch_cpp(double b, double c) {
  const double mu = (2.0 * b + 1.0) / (b + 1.0);
  return std::pow(2.0, 1.0 / mu) * 2.0 * c * std::pow(mu, 2.0 * (b + 1.0) / b);
}

inline double stretch_lambda_min(double b, double kappa0, double J, double c) {
  const double mu = (2.0 * b + 1.0) / (b + 1.0);
  const double cpp = stretch_cpp(b, c);
  // base step kappa0 -> kappa0/2 admissible with r_0 <= 1/2
  const double t1 = std::pow(2.0, 3.0 + 1.0 / b) * c * J / std::pow(kappa0, 2.0 + 1.0 / b);
  // curve ratio guard at its tightest point kappa_* = kappa0/4:
  // (1/mu)(c''J/lambda)^{b/(b+1)} <= kappa_*^mu / 2
  const double t2 =
      cpp * J * std::pow(2.0 / mu * std::pow(4.0 / kappa0, mu), (b + 1.0) / b);
  return std::max(t1, t2);
}

inline KappaPlan plan_stretch(double b, double kappa0, double J, double lambda, double c = 144.0) {
  if (!(b > 0)) throw parameter_error("plan_stretch: b > 0 required");
  if (!(kappa0 > 0) || !(J > 0) || !(lambda > 0) || !(c > 0))
    throw parameter_error("plan_stretch: positive kappa0, J, lambda, c required");
  KappaPlan plan(SuppressionClass::stretch_expt(b));
  plan.kappa0 = kappa0;
  plan.J = J;
  plan.lambda = lambda;
  const double mu = (2.0 * b + 1.0) / (b + 1.0);
  const double cpp = stretch_cpp(b, c);
  plan.constants["mu"] = mu;
  plan.constants["c"] = c;
  plan.constants["c_double_prime"] = cpp;
  plan.lambda_min = stretch_lambda_min(b, kappa0, J, c);
  plan.valid = lambda >= plan.lambda_min;

  const double kappa1 = kappa0 / 2.0;
  const double kappa_stop = kappa0 / 4.0;
  const double drop = (1.0 / mu) * std::pow(cpp * J / lambda, b / (b + 1.0));
  plan.kappa_seq.push_back(kappa0);
  plan.kappa_seq.push_back(kappa1);
  // walk the reference curve until the next point would cross kappa0/4
  for (int q = 2;; ++q) {
    const double base = std::pow(kappa1, mu) - drop * (static_cast<double>(q) - 1.0);
    if (base <= std::pow(kappa_stop, mu)) break;
    plan.kappa_seq.push_back(std::pow(base, 1.0 / mu));
    if (plan.kappa_seq.size() > 50'000'000)
      throw capacity_error("plan_stretch: kappa sequence over cap");
  }
  plan.q_star = static_cast<int>(plan.kappa_seq.size()) - 1;
  // midpoints kappa'_q used by the two-stage bound
  for (std::size_t i = 0; i + 1 < plan.kappa_seq.size(); ++i)
    plan.kappa_prime_seq.push_back(0.5 * (plan.kappa_seq[i] + plan.kappa_seq[i + 1]));
  // contraction bounds: base step kappa0 -> kappa1, then the curve steps
  for (int q = 0; q < plan.q_star; ++q) {
    const double dk = plan.kappa_seq[q] - plan.kappa_seq[q + 1];
    plan.r_bounds.push_back(c * J / (lambda * plan.kappa_seq[q + 1] * std::pow(dk, (b + 1.0) / b)));
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Quasipolynomial class, optimized uniform spacing:
//   A = 2^{1/(b-1)} c_b, Delta = kappa0/4, K' = Delta/(4A)^{b-1},
//   B = ln(32 c K'/kappa0^2) + C_b^log + ln 2, x = ln(lambda/J) - B,
//   n = floor(K' x^{b-1}), kappa_q = kappa* + Delta (1 - (q-1)/n),
//   r_q <= (1/2) e^{-x/2}, prod r_q <= exp(-K'' ln(lambda/J)^b), K'' = K'/2^{b+2}.
// ---------------------------------------------------------------------------

struct QuasipolyConstants {
  double c_b, A, c, K_prime, C_b_log, B, K_base, X0, K, K_double_prime;
};

inline QuasipolyConstants quasipoly_constants(double b, double kappa0) {
  QuasipolyConstants k{};
  k.c_b = SuppressionClass::quasipoly(b).small_divisor_constant();
  k.A = std::pow(2.0, 1.0 / (b - 1.0)) * k.c_b;
  k.c = std::max(6.0 * kappa0, 288.0);
  const double delta = kappa0 / 4.0;
  k.K_prime = delta / std::pow(4.0 * k.A, b - 1.0);
  k.C_b_log = (b - 1.0) * (std::log(4.0 * (b - 1.0)) - 1.0);
  k.B = std::log(32.0 * k.c * k.K_prime / (kappa0 * kappa0)) + k.C_b_log + std::log(2.0);
  k.K_base = 8.0 * k.c / (kappa0 * kappa0) *
             std::exp(std::pow(2.0, 2.0 / (b - 1.0)) * k.c_b / std::pow(kappa0, 1.0 / (b - 1.0)));
  k.X0 = std::max(2.0, std::pow(2.0 / k.K_prime, 1.0 / (b - 1.0)));
  k.K = std::max({k.K_base, std::exp(k.B + k.X0), std::exp(2.0 * k.B)});
  k.K_double_prime = k.K_prime / std::pow(2.0, b + 2.0);
  return k;
}

inline KappaPlan plan_quasipoly(double b, double kappa0, double J, double lambda) {
  if (!(b > 1)) throw parameter_error("plan_quasipoly: b > 1 required");
  if (!(kappa0 > 0) || !(J > 0) || !(lambda > 0))
    throw parameter_error("plan_quasipoly: positive kappa0, J, lambda required");
  KappaPlan plan(SuppressionClass::quasipoly(b));
  plan.kappa0 = kappa0;
  plan.J = J;
  plan.lambda = lambda;
  const QuasipolyConstants k = quasipoly_constants(b, kappa0);
  plan.constants = {{"c_b", k.c_b},       {"A", k.A},   {"c", k.c},
                    {"K_prime", k.K_prime}, {"B", k.B},   {"K_base", k.K_base},
                    {"X0", k.X0},           {"K", k.K},   {"K_double_prime", k.K_double_prime}};
  plan.lambda_min = k.K * J;
  plan.valid = lambda >= plan.lambda_min;

  const double L = std::log(lambda / J);
  const double x = L - k.B;
  plan.constants["L"] = L;
  plan.constants["x"] = x;
  if (!plan.valid || !(x > 0)) {
    plan.q_star = 0;
    plan.kappa_seq = {kappa0};
    return plan;
  }
  const double n = std::floor(k.K_prime * std::pow(x, b - 1.0));
  const long nn = static_cast<long>(std::min(n, 5e7));
  plan.constants["n"] = static_cast<double>(nn);
  if (nn < 1) {  // cannot happen on a valid plan (x >= X0 forces n >= 2)
    plan.q_star = 0;
    plan.kappa_seq = {kappa0};
    plan.valid = false;
    return plan;
  }
  plan.q_star = static_cast<int>(nn) + 1;
  const double delta = kappa0 / 4.0;
  plan.kappa_seq.push_back(kappa0);
  for (long q = 1; q <= nn + 1; ++q)
    plan.kappa_seq.push_back(kappa0 / 4.0 +
                             delta * (1.0 - (static_cast<double>(q) - 1.0) / static_cast<double>(nn)));
  for (std::size_t i = 1; i + 1 < plan.kappa_seq.size(); ++i)
    plan.kappa_prime_seq.push_back(0.5 * (plan.kappa_seq[i] + plan.kappa_seq[i + 1]));
  plan.r_bounds.assign(nn, 0.5 * std::exp(-x / 2.0));
  return plan;
}

// ---------------------------------------------------------------------------
// Bounds.
// ---------------------------------------------------------------------------

struct AdhhBound {
  double bound;
  bool hypothesis_ok;  // 3 ||A||_kappa <= kappa - kappa'
};

// ||e^{ad_A} O - O||_{kappa'} <= 18/(kappa'(kappa-kappa')) ||A|| ||O||.
inline AdhhBound adhh_bound(double kappa, double kappa_prime, double norm_A, double norm_O) {
  if (!(kappa_prime > 0) || !(kappa_prime < kappa))
    throw parameter_error("adhh_bound: 0 < kappa' < kappa required");
  const double gap = kappa - kappa_prime;
  return {18.0 / (kappa_prime * gap) * norm_A * norm_O, 3.0 * norm_A <= gap};
}

// Per-step contraction bound r_q for the plan's q-th iteration (q counts from
// the first kappa_seq step).
inline double step_ratio_bound(const KappaPlan& plan, int q, double J, double lambda) {
  switch (plan.cls.kind) {
    case ClassKind::Poly: {
      if (q < 0 || q >= plan.q_star) throw parameter_error("step_ratio_bound: q out of range");
      const double b = plan.cls.b;
      return 576.0 * b * b * b * J / lambda;
    }
    case ClassKind::StretchExpt: {
      if (q < 0 || q >= plan.q_star) throw parameter_error("step_ratio_bound: q out of range");
      const double b = plan.cls.b;
      const double c = plan.constants.at("c");
      const double dk = plan.kappa_seq[q] - plan.kappa_seq[q + 1];
      return c * J / (lambda * plan.kappa_seq[q + 1] * std::pow(dk, (b + 1.0) / b));
    }
    case ClassKind::Quasipoly: {
      if (q < 1 || q >= plan.q_star) throw parameter_error("step_ratio_bound: q out of range");
      return 0.5 * std::exp(-plan.constants.at("x") / 2.0);
    }
  }
  throw parameter_error("step_ratio_bound: bad class");
}

// Evaluates the explicit quasipoly single-step estimate
// (2cJ/lambda) (1/(kappa_{q+1} delta_q)) exp(A/delta_q^{1/(b-1)}) for a given
// spacing; used to compare spacings and as a cross-check of the 1/2 e^{-x/2}
// form.
inline double quasipoly_step_bound_explicit(double b, double c, double A, double J, double lambda,
                                            double kappa_next, double delta_q) {
  return 2.0 * c * J / lambda / (kappa_next * delta_q) *
         std::exp(A / std::pow(delta_q, 1.0 / (b - 1.0)));
}

// ln tau* = -sum_q ln r_q over the plan's contraction steps.
inline double tau_star_np(const KappaPlan& plan) {
  if (!plan.valid)
    throw numerical_error("tau_star_np: plan invalid, lambda below " + format_g17(plan.lambda_min));
  double ln_tau = 0;
  for (double r : plan.r_bounds) {
    if (!(r > 0)) throw numerical_error("tau_star_np: nonpositive step bound");
    ln_tau -= std::log(r);
  }
  return ln_tau;
}

// Flow rate d kappa / dq per class (Lambert W principal branch for quasipoly).
inline double beta_function(const SuppressionClass& cls, double kappa, double J, double lambda) {
  if (!(kappa > 0) || !(lambda > 0) || !(J > 0))
    throw parameter_error("beta_function: positive kappa, J, lambda required");
  switch (cls.kind) {
    case ClassKind::Poly:
      return -1.0 / cls.b;
    case ClassKind::StretchExpt:
      return -std::pow(J / (lambda * kappa), cls.b / (cls.b + 1.0));
    case ClassKind::Quasipoly: {
      const double w = lambert_w(std::pow(lambda * kappa / J, 1.0 / (cls.b - 1.0)));
      return -std::pow(w, 1.0 - cls.b);
    }
  }
  throw parameter_error("beta_function: bad class");
}

}  // namespace prethermal
