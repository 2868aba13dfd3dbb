#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "dressed/core.hpp"

namespace dressed::spinor {

// Spin projection on the z axis (the quantization axis).
enum class Spin : int { up = +1, down = -1 };

inline Spin flip(Spin s) { return s == Spin::up ? Spin::down : Spin::up; }

//==============================================================================
// Two-component Pauli spinor.
struct PauliSpinor {
  std::array<complexd, 2> w{};
};

inline PauliSpinor pauli_eigenstate(Spin lambda) {
  PauliSpinor s;
  if (lambda == Spin::up)
    s.w = {complexd(1.0, 0.0), complexd(0.0, 0.0)};
  else
    s.w = {complexd(0.0, 0.0), complexd(1.0, 0.0)};
  return s;
}

// (p . sigma) acting on a Pauli spinor.
inline PauliSpinor sigma_dot(const ThreeVector& p, const PauliSpinor& s) {
  PauliSpinor out;
  out.w[0] = p.z * s.w[0] + complexd(p.x, -p.y) * s.w[1];
  out.w[1] = complexd(p.x, p.y) * s.w[0] - p.z * s.w[1];
  return out;
}

//==============================================================================
// Four-component Dirac bispinor in the standard representation, unit mass.
struct Bispinor {
  std::array<complexd, 4> c{};
  Spin lambda = Spin::up;
  ThreeVector p{};
  double energy = 1.0;  // eps_p = sqrt(1 + p^2)
};

inline double electron_energy(const ThreeVector& p) { return std::sqrt(1.0 + norm2(p)); }

//! Positive-energy bispinor u_{lambda p}. The lower block is written as
//! (p.sigma) w / sqrt(eps+1), which removes the 0/0 at p = 0.
inline Bispinor bispinor_u(Spin lambda, const ThreeVector& p) {
  const double eps = electron_energy(p);
  const double upper = std::sqrt((eps + 1.0) / (2.0 * eps));
  const double lower = 1.0 / std::sqrt(2.0 * eps * (eps + 1.0));
  const PauliSpinor w = pauli_eigenstate(lambda);
  const PauliSpinor pw = sigma_dot(p, w);

  Bispinor u;
  u.lambda = lambda;
  u.p = p;
  u.energy = eps;
  u.c = {upper * w.w[0], upper * w.w[1], lower * pw.w[0], lower * pw.w[1]};
  return u;
}

//! Negative-energy bispinor v_{lambda p}: blocks of u_{-lambda,-p} swapped
//! with a sign, which lands on the displayed (p.sigma-upper) form.
inline Bispinor bispinor_v(Spin lambda, const ThreeVector& p) {
  const Bispinor u = bispinor_u(flip(lambda), -p);
  Bispinor v;
  v.lambda = lambda;
  v.p = p;
  v.energy = u.energy;
  v.c = {-u.c[2], -u.c[3], u.c[0], u.c[1]};
  return v;
}

//==============================================================================
// Current matrix elements ubar_{l'p'} gamma^mu u_{lp}.
//
// With u = (a; b) in the standard representation:
//   j^0 = a'^+ a + b'^+ b,   j^i = a'^+ sigma_i b + b'^+ sigma_i a.

inline FourVector current_vector(Spin lambda_out, const ThreeVector& p_out, Spin lambda_in,
                                 const ThreeVector& p_in) {
  const Bispinor uo = bispinor_u(lambda_out, p_out);
  const Bispinor ui = bispinor_u(lambda_in, p_in);

  const complexd a0 = std::conj(uo.c[0]), a1 = std::conj(uo.c[1]);
  const complexd b0 = std::conj(uo.c[2]), b1 = std::conj(uo.c[3]);
  const complexd c0 = ui.c[0], c1 = ui.c[1], d0 = ui.c[2], d1 = ui.c[3];

  FourVector j;
  j.t = a0 * c0 + a1 * c1 + b0 * d0 + b1 * d1;
  // sigma_x, sigma_y, sigma_z sandwiches of (a'| . |d) and (b'| . |c)
  j.x = a0 * d1 + a1 * d0 + b0 * c1 + b1 * c0;
  j.y = complexd(0.0, -1.0) * (a0 * d1 - a1 * d0) + complexd(0.0, -1.0) * (b0 * c1 - b1 * c0);
  j.z = a0 * d0 - a1 * d1 + b0 * c0 - b1 * c1;
  return j;
}

inline complexd current_element(Spin lambda_out, const ThreeVector& p_out, Spin lambda_in,
                                const ThreeVector& p_in, int mu) {
  const FourVector j = current_vector(lambda_out, p_out, lambda_in, p_in);
  switch (mu) {
    case 0: return j.t;
    case 1: return j.x;
    case 2: return j.y;
    case 3: return j.z;
    default: throw std::domain_error("current_element: mu must be 0..3");
  }
}

//==============================================================================
// Photon polarization tetrad for a wavevector q: scalar e0, transverse e1,e2,
// longitudinal e3. The tetrad depends on the direction only.
struct PolarizationBasis {
  ThreeVector q{};
  std::array<FourVector, 4> e{};
  static constexpr std::array<double, 4> metric_weight = {1.0, -1.0, -1.0, -1.0};
};

inline PolarizationBasis polarization_basis(const ThreeVector& q) {
  if (norm(q) == 0.0) throw std::domain_error("polarization_basis: |q| = 0 has no direction");
  const ThreeVector n = normalized(q);

  // Deterministic transverse pair: n x z unless nearly parallel, then n x x.
  ThreeVector t1 = cross(n, ThreeVector{0.0, 0.0, 1.0});
  if (norm(t1) < 1e-8) t1 = cross(n, ThreeVector{1.0, 0.0, 0.0});
  t1 = normalized(t1);
  const ThreeVector t2 = cross(n, t1);

  PolarizationBasis basis;
  basis.q = q;
  basis.e[0] = FourVector(1.0, ThreeVector{0.0, 0.0, 0.0});
  basis.e[1] = FourVector(0.0, t1);
  basis.e[2] = FourVector(0.0, t2);
  basis.e[3] = FourVector(0.0, n);
  return basis;
}

}  // namespace dressed::spinor
