#pragma once

// Closed-form U(2)/SU(2) algebra on the basis (I, sigma_x, sigma_y, sigma_z).
// Unitaries are stored as M = a I + b . sigma with complex a, b; products use
// the quaternion-like rule, exponentials and principal logs the Euler form
// U = e^{i theta} (cos(phi) I - i sin(phi) n . sigma). Templated on the real
// type; long double is used where coefficient extraction needs the margin.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "prethermal/common.hpp"

namespace prethermal {

// Hermitian operator H = c0 I + x sigma_x + y sigma_y + z sigma_z.
template <class R>
struct Su2T {
  R c0 = 0, x = 0, y = 0, z = 0;

  R bloch_radius() const { return std::sqrt(x * x + y * y + z * z); }
  // exact operator norm of a 2x2 Hermitian: |c0| + Bloch radius
  R norm() const { return std::fabs(c0) + bloch_radius(); }

  Su2T operator+(const Su2T& o) const { return {c0 + o.c0, x + o.x, y + o.y, z + o.z}; }
  Su2T operator-(const Su2T& o) const { return {c0 - o.c0, x - o.x, y - o.y, z - o.z}; }
  Su2T operator*(R s) const { return {c0 * s, x * s, y * s, z * s}; }
  Su2T& operator+=(const Su2T& o) {
    c0 += o.c0;
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  template <class R2>
  Su2T<R2> cast() const {
    return {static_cast<R2>(c0), static_cast<R2>(x), static_cast<R2>(y), static_cast<R2>(z)};
  }
};

using Su2Operator = Su2T<double>;

template <class R>
Su2T<R> commutator_i(const Su2T<R>& a, const Su2T<R>& b) {
  // (1/(2i)) [a.sigma, b.sigma] = (a x b).sigma ; returns c with [A,B] = 2i c.sigma
  return {0, a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <class R>
struct U2T {
  std::complex<R> a{1, 0};
  std::array<std::complex<R>, 3> b{{{0, 0}, {0, 0}, {0, 0}}};

  static U2T identity() { return {}; }

  U2T mul(const U2T& o) const {
    U2T r;
    r.a = a * o.a + b[0] * o.b[0] + b[1] * o.b[1] + b[2] * o.b[2];
    const std::complex<R> i(0, 1);
    r.b[0] = a * o.b[0] + o.a * b[0] + i * (b[1] * o.b[2] - b[2] * o.b[1]);
    r.b[1] = a * o.b[1] + o.a * b[1] + i * (b[2] * o.b[0] - b[0] * o.b[2]);
    r.b[2] = a * o.b[2] + o.a * b[2] + i * (b[0] * o.b[1] - b[1] * o.b[0]);
    return r;
  }

  U2T dagger() const {
    U2T r;
    r.a = std::conj(a);
    for (int i = 0; i < 3; ++i) r.b[i] = std::conj(b[i]);
    return r;
  }

  R distance(const U2T& o) const {
    R d = std::abs(a - o.a);
    for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(b[i] - o.b[i]));
    return d;
  }

  // max deviation of U U^dag from I
  R unitarity_defect() const {
    const U2T p = mul(dagger());
    R d = std::abs(p.a - std::complex<R>(1, 0));
    for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(p.b[i]));
    return d;
  }
};

using U2 = U2T<double>;

// e^{-i t H} for Hermitian H.
template <class R>
U2T<R> exp_minus_i(R t, const Su2T<R>& h) {
  const R r = h.bloch_radius();
  const R ang = t * r;
  const std::complex<R> phase = std::polar<R>(1, -t * h.c0);
  const R sinc = r > 0 ? std::sin(ang) / r : t;  // sin(t r)/r, t at r = 0
  U2T<R> u;
  u.a = phase * std::cos(ang);
  const std::complex<R> f = phase * std::complex<R>(0, -1) * sinc;
  u.b[0] = f * h.x;
  u.b[1] = f * h.y;
  u.b[2] = f * h.z;
  return u;
}

// e^{A} for anti-Hermitian A = i (g.c0 I + g.sigma), g real.
template <class R>
U2T<R> exp_antiherm(const Su2T<R>& g) {
  const R r = g.bloch_radius();
  const std::complex<R> phase = std::polar<R>(1, g.c0);
  const R sinc = r > 0 ? std::sin(r) / r : R(1);
  U2T<R> u;
  u.a = phase * std::cos(r);
  const std::complex<R> f = phase * std::complex<R>(0, 1) * sinc;
  u.b[0] = f * g.x;
  u.b[1] = f * g.y;
  u.b[2] = f * g.z;
  return u;
}

// Branch-ambiguity margin: eigenphases must stay inside (-pi + margin, pi - margin).
inline constexpr double kLogBranchMargin = 1e-9;

// H = (i/dt) log U with the principal log: U = e^{i theta}(cos phi I - i sin phi n.sigma),
// eigenphases theta -+ phi required strictly inside (-pi, pi).
template <class R>
Su2T<R> principal_log_su2(const U2T<R>& u, R dt) {
  if (u.unitarity_defect() > 1e-10)
    throw parameter_error("principal_log_su2: input is not unitary to 1e-10");
  const std::complex<R> det = u.a * u.a - (u.b[0] * u.b[0] + u.b[1] * u.b[1] + u.b[2] * u.b[2]);
  const R theta = std::arg(det) / 2;
  const std::complex<R> unwind = std::polar<R>(1, -theta);
  const R cosphi = std::real(u.a * unwind);
  const std::complex<R> i(0, 1);
  const R sx = std::real(i * u.b[0] * unwind);
  const R sy = std::real(i * u.b[1] * unwind);
  const R sz = std::real(i * u.b[2] * unwind);
  const R sinphi = std::sqrt(sx * sx + sy * sy + sz * sz);
  const R phi = std::atan2(sinphi, cosphi);  // in [0, pi]
  if (std::fabs(theta) + phi >= kPi - kLogBranchMargin)
    throw numerical_error("principal_log_su2: eigenphase at the +-pi branch cut; reduce dt");
  Su2T<R> h;
  h.c0 = -theta / dt;
  if (sinphi > 0) {
    const R f = phi / (sinphi * dt);
    h.x = f * sx;
    h.y = f * sy;
    h.z = f * sz;
  }
  return h;
}

}  // namespace prethermal
