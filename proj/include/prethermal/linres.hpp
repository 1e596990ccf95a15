#pragma once

// Linear-response heating rates: the Kubo-form integral
//   rate = (g^2/lambda) int_0^inf e^{-Omega/J - 2 p(Omega/lambda)} dOmega
// evaluated by adaptive quadrature (the oracle) and by the Gaussian saddle
// approximation, plus tau* extraction. The Kubo spectral function is fixed
// to e^{-|Omega|/J} exactly so the oracle is deterministic.

#include <cmath>
#include <functional>
#include <limits>

#include "prethermal/arithmetic.hpp"
#include "prethermal/common.hpp"

namespace prethermal {

struct HeatingParams {
  SuppressionClass cls;
  double J = 1.0;      // local energy scale
  double lambda = 1.0; // drive speed
  double g = 1.0;      // drive amplitude

  HeatingParams(SuppressionClass c, double J_, double lambda_, double g_)
      : cls(c), J(J_), lambda(lambda_), g(g_) {
    if (!(J > 0) || !(lambda > 0) || !(g > 0))
      throw parameter_error("HeatingParams: J, lambda, g must be positive");
  }
};

// phi(Omega; lambda) = Omega/J + 2 p(Omega/lambda)
inline double heating_exponent(const HeatingParams& hp, double omega) {
  return omega / hp.J + 2.0 * hp.cls.p(omega / hp.lambda);
}

struct SaddlePoint {
  double omega0;
  double phi0;
};

// Stationary point of the heating exponent. Closed form for StretchExpt and
// Poly; damped fixed-point iteration of Omega = 2bJ [ln(lambda/Omega)]^{b-1}
// for Quasipoly.
inline SaddlePoint saddle_point(const HeatingParams& hp) {
  const double b = hp.cls.b, J = hp.J, lam = hp.lambda;
  double omega0 = 0;
  switch (hp.cls.kind) {
    case ClassKind::Poly:
      omega0 = 2.0 * b * J;  // independent of lambda
      break;
    case ClassKind::StretchExpt:
      omega0 = std::pow(2.0 * b * J, 1.0 / (b + 1.0)) * std::pow(lam, b / (b + 1.0));
      break;
    case ClassKind::Quasipoly: {
      double x = 1.0;  // iterate L = ln(lambda/Omega0) via Omega0 = 2bJ L^{b-1}
      bool converged = false;
      for (int it = 0; it < 400; ++it) {
        const double next = 0.5 * x + 0.5 * (std::log(lam) - std::log(2.0 * b * J * std::pow(x, b - 1.0)));
        if (!(next > 0)) throw numerical_error("saddle_point: quasipoly iteration left the domain (lambda too small)");
        if (std::fabs(next - x) <= 1e-10 * std::fabs(next)) {
          x = next;
          converged = true;
          break;
        }
        x = next;
      }
      if (!converged) throw numerical_error("saddle_point: quasipoly fixed point did not converge");
      omega0 = 2.0 * b * J * std::pow(x, b - 1.0);
      if (!(lam >= std::exp(1.0) * omega0))
        throw numerical_error("saddle_point: lambda below the e*Omega0 guard");
      break;
    }
  }
  return {omega0, heating_exponent(hp, omega0)};
}

// Analytic phi'' at the saddle, per class.
inline double phi_second_derivative(const HeatingParams& hp, double omega0) {
  const double b = hp.cls.b, lam = hp.lambda;
  switch (hp.cls.kind) {
    case ClassKind::Poly:
      return 2.0 * b / (omega0 * omega0);
    case ClassKind::StretchExpt:
      return 2.0 * b * (b + 1.0) * std::pow(lam, b) * std::pow(omega0, -b - 2.0);
    case ClassKind::Quasipoly: {
      const double L = std::log(lam / omega0);
      return (2.0 * b / (omega0 * omega0)) * std::pow(L, b - 2.0) * ((b - 1.0) + L);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (7-15) panel refinement in log-Omega coordinates.
// ---------------------------------------------------------------------------

namespace detail {

// 15-point Kronrod nodes/weights on [-1,1] with the embedded 7-point Gauss rule.
inline const double kKronrodNodes[15] = {
    -0.99145537112081263921, -0.94910791234275852453, -0.86486442335976907279,
    -0.74153118559939443986, -0.58608723546769113029, -0.40584515137739716691,
    -0.20778495500789846760, 0.0,
    0.20778495500789846760, 0.40584515137739716691, 0.58608723546769113029,
    0.74153118559939443986, 0.86486442335976907279, 0.94910791234275852453,
    0.99145537112081263921};
inline const double kKronrodWeights[15] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801,
    0.20443294007529889241, 0.19035057806478540991, 0.16900472663926790283,
    0.14065325971552591875, 0.10479001032225018384, 0.06309209262997855329,
    0.02293532201052922496};
inline const double kGaussWeights7[7] = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776, 0.38183005050511894495, 0.27970539148927666790,
    0.12948496616886969327};

template <class F>
void gk15(const F& f, double a, double b, double& kronrod, double& err) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fk = 0, fg = 0;
  for (int i = 0; i < 15; ++i) {
    const double v = f(c + h * kKronrodNodes[i]);
    fk += v * kKronrodWeights[i];
    if (i % 2 == 1) fg += v * kGaussWeights7[i / 2];
  }
  kronrod = fk * h;
  err = std::fabs((fk - fg) * h);
}

template <class F>
double adaptive_gk(const F& f, double a, double b, double rel_tol, double* achieved = nullptr) {
  struct Panel {
    double a, b, value, err;
  };
  std::vector<Panel> panels;
  double v0, e0;
  gk15(f, a, b, v0, e0);
  panels.push_back({a, b, v0, e0});
  for (int round = 0; round < 8000; ++round) {
    double total = 0, err = 0;
    std::size_t worst = 0;
    double worst_err = -1;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].value;
      err += panels[i].err;
      if (panels[i].err > worst_err) {
        worst_err = panels[i].err;
        worst = i;
      }
    }
    if (err <= rel_tol * std::fabs(total) || panels.size() > 4000) {
      if (achieved) *achieved = err / std::max(std::fabs(total), 1e-300);
      if (err > rel_tol * std::fabs(total))
        throw numerical_error("adaptive quadrature: tolerance not reached, achieved " +
                              format_g17(err / std::max(std::fabs(total), 1e-300)));
      return total;
    }
    const Panel p = panels[worst];
    panels.erase(panels.begin() + static_cast<std::ptrdiff_t>(worst));
    const double mid = 0.5 * (p.a + p.b);
    Panel l{p.a, mid, 0, 0}, r{mid, p.b, 0, 0};
    gk15(f, l.a, l.b, l.value, l.err);
    gk15(f, r.a, r.b, r.value, r.err);
    panels.push_back(l);
    panels.push_back(r);
  }
  throw numerical_error("adaptive quadrature: refinement limit reached");
}

}  // namespace detail

// Generic weighted integral int exp(-(phi(e^u) - shift) + u) du over a log
// window; exposed so tests can drive synthetic exponents through the same path.
template <class Phi>
double log_window_integral(const Phi& phi, double omega_lo, double omega_hi, double shift,
                           double rel_tol) {
  auto integrand = [&](double u) {
    const double om = std::exp(u);
    return std::exp(-(phi(om) - shift) + u);
  };
  return detail::adaptive_gk(integrand, std::log(omega_lo), std::log(omega_hi), rel_tol);
}

// Direct evaluation of the heating integral. The integration window is chosen
// so the truncated tails are negligible at the requested tolerance: the
// integrand is rescaled by its peak value and cut 60+ln(1/tol) e-folds below.
inline double heating_quadrature(const HeatingParams& hp, double rel_tol = 1e-8) {
  if (!(rel_tol > 1e-12 && rel_tol < 1e-2))
    throw parameter_error("heating_quadrature: rel_tol in (1e-12, 1e-2) required");
  auto phi = [&](double om) { return heating_exponent(hp, om); };

  // peak location (saddle, or J for the flat b = 0 limit)
  double omega_peak;
  if (hp.cls.kind == ClassKind::Poly && hp.cls.b == 0) {
    omega_peak = hp.J;
  } else {
    omega_peak = saddle_point(hp).omega0;
  }
  const double phi_peak = std::min(phi(omega_peak), phi(hp.J));
  const double efolds = 60.0 + std::log(1.0 / rel_tol);
  // upper cutoff: beyond the peak the e^{-Omega/J} factor dominates
  const double omega_hi = std::max(omega_peak, hp.J * (phi_peak + 2.0 * efolds));
  const double omega_lo = std::min(omega_peak, hp.J) * std::exp(-efolds);
  const double value = log_window_integral(phi, omega_lo, omega_hi, phi_peak, rel_tol);
  return hp.g * hp.g / hp.lambda * value * std::exp(-phi_peak);
}

// ln of the Gaussian-approximation rate,
// rate = (g^2/lambda) sqrt(2 pi / phi''(Omega0)) e^{-phi(Omega0)}.
// Poly has no large-parameter limit, so it delegates to the quadrature.
inline double ln_laplace_heating(const HeatingParams& hp) {
  if (hp.cls.kind == ClassKind::Poly) return std::log(heating_quadrature(hp));
  const SaddlePoint sp = saddle_point(hp);
  const double phipp = phi_second_derivative(hp, sp.omega0);
  if (!(phipp > 0)) throw numerical_error("laplace_heating: phi'' <= 0 at the saddle");
  return 2.0 * std::log(hp.g) - std::log(hp.lambda) + 0.5 * std::log(2.0 * kPi / phipp) - sp.phi0;
}

inline double laplace_heating(const HeatingParams& hp) {
  if (hp.cls.kind == ClassKind::Poly) return heating_quadrature(hp);
  return std::exp(ln_laplace_heating(hp));
}

struct TauStar {
  double ln_tau_star;
  double tau_star;     // +inf when the rate underflowed
  bool log_space_only; // set when tau* itself is not representable
};

// tau* = 1/rate, Laplace-based (quadrature for Poly). Computed in log space;
// when the rate underflows a double the flag is set and only ln tau* is valid.
inline TauStar tau_star_lrt(const HeatingParams& hp) {
  const double ln_rate = hp.cls.kind == ClassKind::Poly ? std::log(heating_quadrature(hp))
                                                        : ln_laplace_heating(hp);
  TauStar t;
  t.ln_tau_star = -ln_rate;
  t.log_space_only = t.ln_tau_star > std::log(std::numeric_limits<double>::max());
  t.tau_star = t.log_space_only ? std::numeric_limits<double>::infinity() : std::exp(t.ln_tau_star);
  return t;
}

}  // namespace prethermal
