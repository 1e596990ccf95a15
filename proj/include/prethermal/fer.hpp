#pragma once

// Discrete Fer expansion on a driven two-level system: step Hamiltonians
// H_n = J sigma_z + g s_n sigma_x, the zero-mean splitting H_n = D + V_n, the
// generator recursion Delta A_n = -i dt V_n (A_0 = 0), and the exact
// principal-log dressed step Hamiltonians
//   H'_n = (i/dt) log(P_{n+1}^dag e^{-i dt H_n} P_n),  P_n = e^{A_n}.
// With a zero-mean V the generator closes (A_N = 0), so the time-ordered
// dressed product equals the bare product exactly; that identity is the
// frame-change test.

#include <string>
#include <vector>

#include "prethermal/common.hpp"
#include "prethermal/drives.hpp"
#include "prethermal/spectra.hpp"
#include "prethermal/su2.hpp"

namespace prethermal {

struct FerState {
  int q = 0;                    // iteration order
  double dt = 1.0;              // step duration (1/lambda)
  Su2Operator D;                // time-independent part
  std::vector<Su2Operator> V;   // per-step drive, zero mean per coefficient
  std::vector<Su2Operator> A;   // generators as i*(coeffs.sigma); size N+1, A[0] = A[N] = 0

  std::size_t steps() const { return V.size(); }
};

inline constexpr double kZeroMeanTol = 1e-12;
// dt * max step norm must stay below this so all eigenphases clear the branch cut.
inline constexpr double kBranchGuard = 2.0;

inline double max_step_norm(const FerState& s) {
  double m = 0;
  for (const auto& v : s.V) m = std::max(m, v.norm());
  return m;
}

inline Su2Operator mean_operator(const std::vector<Su2Operator>& ops) {
  Su2Operator m;
  for (const auto& o : ops) m += o;
  return m * (1.0 / static_cast<double>(ops.size()));
}

// q = 0 state: H_n = J sigma_z + g s_n sigma_x, D = mean, V_n = H_n - D.
inline FerState step_hamiltonians(const StepSequence& seq, double J, double g) {
  if (seq.values.empty()) throw parameter_error("step_hamiltonians: empty sequence");
  if (!std::isfinite(J) || !std::isfinite(g))
    throw parameter_error("step_hamiltonians: J, g must be finite");
  FerState st;
  st.q = 0;
  st.dt = seq.dt;
  const double mean = seq.mean();
  st.D = {0.0, g * mean, 0.0, J};
  st.V.reserve(seq.size());
  for (auto s : seq.values)
    st.V.push_back({0.0, g * (static_cast<double>(s) - mean), 0.0, 0.0});
  return st;
}

// A_n = -i dt sum_{m<n} V_m, stored as the real sigma-coefficients of A/i.
// Requires zero-mean V so A_N returns to zero (no secular growth).
inline const std::vector<Su2Operator>& solve_generator(FerState& st) {
  const Su2Operator vbar = mean_operator(st.V);
  if (std::fabs(vbar.c0) > kZeroMeanTol || vbar.bloch_radius() > kZeroMeanTol)
    throw parameter_error("solve_generator: V is not zero-mean");
  const std::size_t n = st.V.size();
  st.A.assign(n + 1, Su2Operator{});
  Su2Operator acc;
  for (std::size_t i = 0; i < n; ++i) {
    acc += st.V[i] * (-st.dt);  // A = i * acc.sigma
    st.A[i + 1] = acc;
  }
  return st.A;
}

// One exact dressing step: new D = time average of the dressed step
// Hamiltonians, new V = remainder.
inline FerState fer_iterate(const FerState& state) {
  FerState st = state;
  if (st.A.size() != st.V.size() + 1) solve_generator(st);
  const std::size_t n = st.V.size();

  std::vector<Su2Operator> dressed(n);
  std::vector<U2> p(n + 1);
  for (std::size_t i = 0; i <= n; ++i) p[i] = exp_antiherm(st.A[i]);
  parallel_for(n, [&](std::size_t i) {
    const Su2Operator h = st.D + st.V[i];
    if (st.dt * h.norm() > kBranchGuard)
      throw numerical_error("fer_iterate: dt * ||H_n|| over the branch guard");
    const U2 u = p[i + 1].dagger().mul(exp_minus_i(st.dt, h).mul(p[i]));
    dressed[i] = principal_log_su2(u, st.dt);
  });

  FerState out;
  out.q = st.q + 1;
  out.dt = st.dt;
  out.D = mean_operator(dressed);
  out.V.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.V[i] = dressed[i] - out.D;
  return out;
}

// P^dag (c0 I + c.sigma) P for Hermitian input, via exact U(2) products.
inline Su2Operator conjugate_hermitian(const U2& p, const Su2Operator& h) {
  U2 m;
  m.a = h.c0;
  m.b = {std::complex<double>(h.x), std::complex<double>(h.y), std::complex<double>(h.z)};
  const U2 r = p.dagger().mul(m.mul(p));
  return {std::real(r.a), std::real(r.b[0]), std::real(r.b[1]), std::real(r.b[2])};
}

// BCH-truncated variant kept for comparison with the exact-log step:
// H'_n ~ P_{n+1}^dag H_n P_{n+1} - V_n (conjugation exact, log to first order).
inline FerState fer_iterate_truncated(const FerState& state) {
  FerState st = state;
  if (st.A.size() != st.V.size() + 1) solve_generator(st);
  const std::size_t n = st.V.size();
  std::vector<Su2Operator> dressed(n);
  parallel_for(n, [&](std::size_t i) {
    const U2 pn1 = exp_antiherm(st.A[i + 1]);
    dressed[i] = conjugate_hermitian(pn1, st.D + st.V[i]) - st.V[i];
  });
  FerState out;
  out.q = st.q + 1;
  out.dt = st.dt;
  out.D = mean_operator(dressed);
  out.V.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.V[i] = dressed[i] - out.D;
  return out;
}

// Time-ordered product of the state's step propagators (later steps leftmost).
inline U2 propagator_product(const FerState& st) {
  U2 acc = U2::identity();
  for (std::size_t i = 0; i < st.V.size(); ++i)
    acc = exp_minus_i(st.dt, st.D + st.V[i]).mul(acc);
  return acc;
}

// Mean-subtracted DFT of one Pauli-coefficient series of V.
inline Spectrum dressed_spectrum(const FerState& st, char component) {
  if (st.V.size() < 4) throw parameter_error("dressed_spectrum: at least 4 steps required");
  std::vector<double> series(st.V.size());
  for (std::size_t i = 0; i < st.V.size(); ++i) {
    switch (component) {
      case 'x': series[i] = st.V[i].x; break;
      case 'y': series[i] = st.V[i].y; break;
      case 'z': series[i] = st.V[i].z; break;
      default: throw parameter_error("dressed_spectrum: component must be x, y, or z");
    }
  }
  return dft(series, true);
}

// Plotting convention of the dressing sequence: the dominant drive axis
// alternates x, y, x, ... with the iteration order.
inline char dominant_component(int q) { return q % 2 == 0 ? 'x' : 'y'; }

// Noise-floor handling for dressed-spectrum slope fits: drop the lowest-decile
// bins (random-signed drives) and bins within 1e3 of the smallest double.
inline Envelope strip_noise_floor(Envelope env, bool random_signed) {
  if (random_signed) env = drop_lowest_decile(std::move(env));
  std::vector<EnvelopePoint> kept;
  for (const auto& p : env.points)
    if (p.magnitude > 1e3 * std::numeric_limits<double>::min()) kept.push_back(p);
  env.points = std::move(kept);
  return env;
}

}  // namespace prethermal
