#pragma once

// Effective-Hamiltonian expansion of signed Thue-Morse blocks,
//   U_m^{(+-)} = T prod_n e^{-i dt (D +- s_n V)},  H_m^{(+-)}(tau) = (i/tau) log U,
//   H_m^{(+-)}(tau) = sum_j tau^j h_{m,j}^{(+-)},  tau = 2^m dt,
// with the block recursion h_{r,m} = 2^{-m(r-m)} (h_{m,m}^+ + h_{m,m}^-)/2 for
// m <= r-1. Base coefficients come from a polynomial least-squares fit of the
// exact block log over a dt ladder; the block products and fits run in long
// double so order-2 coefficients survive the tau^2 division.

#include <vector>

#include <Eigen/Dense>

#include "prethermal/common.hpp"
#include "prethermal/drives.hpp"
#include "prethermal/su2.hpp"

namespace prethermal {

// (i / (2^depth dt)) log of the signed depth-r Thue-Morse block propagator.
inline Su2T<long double> block_effective_hamiltonian(int depth, int sign, const Su2Operator& d,
                                                     const Su2Operator& v, double dt) {
  if (sign != 1 && sign != -1) throw parameter_error("block_effective_hamiltonian: sign must be +-1");
  const StepSequence word = thue_morse_word(depth);
  const auto dl = d.cast<long double>();
  const auto vl = v.cast<long double>();
  U2T<long double> acc;
  for (auto s : word.values) {
    const Su2T<long double> h = dl + vl * static_cast<long double>(sign * s);
    acc = exp_minus_i(static_cast<long double>(dt), h).mul(acc);
  }
  const long double tau = static_cast<long double>(dt) * static_cast<long double>(std::size_t(1) << depth);
  return principal_log_su2(acc, tau);
}

// Least-squares coefficients h_{m,j}, j = 0..degree, of the expansion of the
// block effective Hamiltonian in powers of tau over the dt ladder.
inline std::vector<Su2Operator> fit_block_expansion(int depth, int sign, const Su2Operator& d,
                                                    const Su2Operator& v,
                                                    const std::vector<double>& dt_fit, int degree) {
  const int npts = static_cast<int>(dt_fit.size());
  if (npts < degree + 1)
    throw parameter_error("fit_block_expansion: need at least degree+1 dt values");

  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

  long double tau_max = 0;
  std::vector<long double> taus(npts);
  for (int i = 0; i < npts; ++i) {
    taus[i] = static_cast<long double>(dt_fit[i]) * static_cast<long double>(std::size_t(1) << depth);
    tau_max = std::max(tau_max, taus[i]);
  }

  // scaled Vandermonde (tau/tau_max)^j keeps the normal system well conditioned
  Mat A(npts, degree + 1);
  for (int i = 0; i < npts; ++i) {
    long double p = 1;
    for (int j = 0; j <= degree; ++j) {
      A(i, j) = p;
      p *= taus[i] / tau_max;
    }
  }
  Eigen::ColPivHouseholderQR<Mat> qr(A);

  Mat rhs(npts, 4);
  for (int i = 0; i < npts; ++i) {
    const auto h = block_effective_hamiltonian(depth, sign, d, v, dt_fit[i]);
    rhs(i, 0) = h.c0;
    rhs(i, 1) = h.x;
    rhs(i, 2) = h.y;
    rhs(i, 3) = h.z;
  }
  const Mat sol = qr.solve(rhs);
  if (qr.rank() < degree + 1)
    throw numerical_error("fit_block_expansion: rank-deficient Vandermonde, condition too poor");

  std::vector<Su2Operator> coeffs(degree + 1);
  long double scale = 1;
  for (int j = 0; j <= degree; ++j) {
    coeffs[j] = {static_cast<double>(sol(j, 0) / scale), static_cast<double>(sol(j, 1) / scale),
                 static_cast<double>(sol(j, 2) / scale), static_cast<double>(sol(j, 3) / scale)};
    scale *= tau_max;
  }
  return coeffs;
}

struct MoriMagnusTable {
  int r_max = 0;
  int m_max = 0;
  // h[r][m]: recursion values for m < r, averaged base data at m = r.
  std::vector<std::vector<Su2Operator>> h;
};

// Fills h[r][m] for r = 1..r_max, m = 0..min(m_max, r) from numerically
// extracted base data h_{m,m}^{(+-)} and the block recursion.
inline MoriMagnusTable mori_magnus_terms(const Su2Operator& d, const Su2Operator& v_amp, int r_max,
                                         int m_max, const std::vector<double>& dt_fit) {
  if (m_max > 3) throw parameter_error("mori_magnus_terms: m_max <= 3 required");
  if (r_max < m_max) throw parameter_error("mori_magnus_terms: r >= m_max required");
  if (static_cast<int>(dt_fit.size()) < m_max + 2)
    throw parameter_error("mori_magnus_terms: dt_fit needs at least m_max+2 values");

  const int degree = std::min<int>(m_max + 3, static_cast<int>(dt_fit.size()) - 1);
  std::vector<Su2Operator> base(m_max + 1);  // (h^+_{m,m} + h^-_{m,m})/2
  for (int m = 0; m <= m_max; ++m) {
    const auto cp = fit_block_expansion(m, +1, d, v_amp, dt_fit, degree);
    const auto cm = fit_block_expansion(m, -1, d, v_amp, dt_fit, degree);
    base[m] = (cp[m] + cm[m]) * 0.5;
  }

  MoriMagnusTable tab;
  tab.r_max = r_max;
  tab.m_max = m_max;
  tab.h.assign(r_max + 1, {});
  for (int r = 1; r <= r_max; ++r) {
    const int mtop = std::min(m_max, r);
    tab.h[r].assign(mtop + 1, Su2Operator{});
    for (int m = 0; m <= mtop; ++m) {
      if (m == r) {
        tab.h[r][m] = base[m];
      } else {
        tab.h[r][m] = base[m] * std::ldexp(1.0, -m * (r - m));
      }
    }
  }
  return tab;
}

}  // namespace prethermal
