#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dressed/bessel.hpp"
#include "dressed/core.hpp"
#include "dressed/quadrature.hpp"
#include "dressed/spinor.hpp"

namespace dressed::meanfield {

using spinor::Spin;

//==============================================================================
// Sampled radial curve with provenance metadata.
struct RadialProfile {
  std::string quantity;
  double mass = 1.0;
  double charge = 0.0;
  std::string generation;  // how the samples were produced
  std::vector<double> r;
  std::vector<double> value;

  void validate() const {
    if (r.size() != value.size()) throw std::invalid_argument("RadialProfile: ragged samples");
    double prev = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!(r[i] > prev)) throw std::invalid_argument("RadialProfile: r must ascend and stay > 0");
      if (!std::isfinite(value[i])) throw std::invalid_argument("RadialProfile: non-finite value");
      prev = r[i];
    }
  }
};

// Source trajectory for the kernel potentials. Only rest and uniform motion
// are supported; the non-relativistic evaluators refuse |v| >= 0.3.
struct Trajectory {
  enum class Kind { rest, uniform };
  Kind kind = Kind::rest;
  ThreeVector velocity{};
  ThreeVector origin{};

  ThreeVector velocity_or_zero() const {
    return kind == Kind::rest ? ThreeVector{} : velocity;
  }
  ThreeVector position(double time) const {
    return origin + velocity_or_zero() * time;
  }
  void require_nonrelativistic() const {
    if (norm(velocity_or_zero()) >= 0.3)
      throw std::domain_error("Trajectory: non-relativistic evaluators require |v| < 0.3");
  }
};

//==============================================================================
// Rest-frame scalar potential A0(r) = (2e/pi r) int_0^{2mr} K0.
inline double potential_rest(double r, const Couplings& c = {}) {
  if (!(r > 0.0)) throw std::domain_error("potential_rest: requires r > 0");
  return 2.0 * c.charge() / (pi * r) * specfun::k0_cumulative(2.0 * c.mass * r);
}

// Magnetic-moment form factor; shares the integral of the rest potential.
inline double moment_form_factor(double r, const Couplings& c = {}) {
  if (!(r > 0.0)) throw std::domain_error("moment_form_factor: requires r > 0");
  return 2.0 / (pi * r) * specfun::k0_cumulative(2.0 * c.mass * r);
}

// dPhi/dr = (4m/(pi r)) K0(2mr) - Phi/r, validated by finite differences.
inline double moment_form_factor_derivative(double r, const Couplings& c = {}) {
  if (!(r > 0.0)) throw std::domain_error("moment_form_factor_derivative: requires r > 0");
  const double m = c.mass;
  return 4.0 * m / (pi * r) * specfun::bessel_k0(2.0 * m * r) - moment_form_factor(r, c) / r;
}

//==============================================================================
// Electromagnetic field energy of the resting dressed charge.
struct SelfEnergyResult {
  double numeric = 0.0;
  double analytic = 0.0;  // e^2 m
  double rel_err = 0.0;
};

inline SelfEnergyResult self_energy(const Couplings& c = {}) {
  SelfEnergyResult out;
  out.analytic = c.e2 * c.mass;
  if (c.e2 == 0.0) return out;

  const double m = c.mass;
  specfun::QuadratureSpec spec;
  spec.abs_tol = 1e-13;
  spec.rel_tol = 1e-10;
  spec.max_subdivisions = 900;
  // integrable log^2 endpoint; the slice below 1e-13/m is ~1e-10 relative
  auto integral = specfun::integrate(
      [m](double r) {
        const double k = specfun::bessel_k0(2.0 * m * r);
        return k * k;
      },
      1e-13 / m, 60.0 / m, spec);
  if (!integral.converged) throw std::runtime_error("self_energy: quadrature failed");
  out.numeric = 8.0 / (pi * pi) * c.e2 * m * m * integral.value;
  out.rel_err = std::abs(out.numeric - out.analytic) / out.analytic;
  return out;
}

//==============================================================================
// Vector potential of the electron magnetic moment: A = grad(Phi) x mu,
// mu = (e/m) s.
inline ThreeVector vector_potential_moment(const ThreeVector& r, const ThreeVector& spin,
                                           const Couplings& c = {}) {
  const double rn = norm(r);
  if (!(rn > 0.0)) throw std::domain_error("vector_potential_moment: requires |r| > 0");
  if (std::abs(norm(spin) - 0.5) > 1e-9)
    throw std::domain_error("vector_potential_moment: spin vector must have |s| = 1/2");
  const ThreeVector mu = (c.charge() / c.mass) * spin;
  const ThreeVector grad_phi = moment_form_factor_derivative(rn, c) * normalized(r);
  return cross(grad_phi, mu);
}

//==============================================================================
// Closed-form retarded potential of a uniformly moving point charge.
inline FourVector lienard_wiechert(const ThreeVector& r, double t, const Trajectory& traj,
                                   const Couplings& c = {}) {
  const ThreeVector v = traj.velocity_or_zero();
  const ThreeVector b = r - traj.position(t);
  const double b2 = norm2(b);
  if (b2 == 0.0) throw std::domain_error("lienard_wiechert: field point on the charge");
  const double bv = dot(b, v);
  const double kappa = std::sqrt(bv * bv + (1.0 - norm2(v)) * b2);
  const double a0 = c.charge() / kappa;
  return FourVector(a0, a0 * v);
}

//==============================================================================
// Retarded two-K0 kernel potential for rest or uniform motion.
inline FourVector potential_retarded(const ThreeVector& r, double t, const Trajectory& traj,
                                     const Couplings& c = {}, double rel_tol = 1e-9) {
  traj.require_nonrelativistic();
  const double m = c.mass;
  const ThreeVector v = traj.velocity_or_zero();
  const ThreeVector b = r - traj.position(t);
  if (norm(b) == 0.0) throw std::domain_error("potential_retarded: field point on the charge");

  // R(tau) = |b + v tau|; the kernel argument tau - R vanishes at the
  // retarded delay tau*.
  const double v2 = norm2(v);
  const double bv = dot(b, v);
  const double tau_star = (bv + std::sqrt(bv * bv + (1.0 - v2) * norm2(b))) / (1.0 - v2);

  auto integrand = [&](double tau) {
    const ThreeVector sep = b + tau * v;
    const double R = norm(sep);
    if (R == 0.0) return 0.0;
    return (specfun::bessel_k0(2.0 * m * std::abs(tau - R) + 1e-300) -
            specfun::bessel_k0(2.0 * m * (tau + R))) /
           R;
  };

  specfun::QuadratureSpec spec;
  spec.abs_tol = 1e-14;
  spec.rel_tol = rel_tol;
  spec.max_subdivisions = 3000;

  const double width = 30.0 / (2.0 * m * (1.0 - std::sqrt(v2)));
  const double tau_end = tau_star + width;
  double total = 0.0;
  // split at the kernel singularity; both sides carry integrable log ends
  if (tau_star > 0.0) {
    total += specfun::integrate(integrand, 0.0, tau_star, spec).value;
  }
  total += specfun::integrate(integrand, tau_star, tau_end, spec).value;

  const double a0 = 2.0 * c.charge() * m / pi * total;
  return FourVector(a0, a0 * v);
}

//==============================================================================
// Momentum-space mean potential of the uniformly moving dressed electron.
struct UniformOptions {
  double abs_tol = 1e-11;   // radial quadrature, units of e*m
  double rel_tol = 1e-7;
  int n_phi = 64;
  int theta_base = 32;
  int max_radial_subdivisions = 300;
  int max_tail_cells = 500;
  double pv_exclusion = 1e-6;  // denominator guard width, units of m
};

namespace detail {

using Accum8 = specfun::Accum<8>;

inline Accum8 pack(const FourVector& f) {
  Accum8 a;
  a.v = {f.t.real(), f.t.imag(), f.x.real(), f.x.imag(),
         f.y.real(), f.y.imag(), f.z.real(), f.z.imag()};
  return a;
}

inline FourVector unpack(const Accum8& a) {
  return FourVector(complexd(a.v[0], a.v[1]), complexd(a.v[2], a.v[3]),
                    complexd(a.v[4], a.v[5]), complexd(a.v[6], a.v[7]));
}

// Orthonormal frame with w3 along axis (deterministic tie-breaking).
struct Frame {
  ThreeVector w1, w2, w3;
};

inline Frame frame_along(const ThreeVector& axis) {
  Frame f;
  f.w3 = normalized(axis);
  ThreeVector t = cross(f.w3, ThreeVector{0.0, 0.0, 1.0});
  if (norm(t) < 1e-8) t = cross(f.w3, ThreeVector{1.0, 0.0, 0.0});
  f.w1 = normalized(t);
  f.w2 = cross(f.w3, f.w1);
  return f;
}

}  // namespace detail

//! A^mu(r, t) for a uniformly moving packet center k0 (units of m), evaluated
//! as 2e Re of the mode integral. Unit-mass formulas internally; the mass in
//! the couplings rescales the arguments and the overall magnitude.
inline FourVector potential_uniform(const ThreeVector& r_in, double t_in, const ThreeVector& k0,
                                    Spin lambda, const Couplings& c = {},
                                    const UniformOptions& opts = {}) {
  if (norm(k0) > 0.3)
    throw std::domain_error("potential_uniform: validity guard requires |k0| <= 0.3 m");
  const double rn_in = norm(r_in);
  if (!(rn_in > 0.0)) throw std::domain_error("potential_uniform: requires |r| > 0");

  // rescale to unit mass: A(r,t; m) = m * A(mr, mt; 1)
  const ThreeVector r = c.mass * r_in;
  const double t = c.mass * t_in;
  const double rn = norm(r);

  const detail::Frame frame = detail::frame_along(r);
  const double phi_weights = 2.0 * pi / opts.n_phi;

  auto angular = [&](double q) -> detail::Accum8 {
    const int n_theta = std::max(opts.theta_base, 24 + static_cast<int>(0.75 * q * rn));
    const auto& mu_rule = specfun::gauss_legendre(n_theta);
    FourVector acc;
    for (int i = 0; i < n_theta; ++i) {
      const double mu = mu_rule.nodes[i];
      const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      const complexd radial_phase = std::polar(1.0, q * rn * mu);
      for (int jp = 0; jp < opts.n_phi; ++jp) {
        const double phi = phi_weights * jp;
        const ThreeVector dir = st * std::cos(phi) * frame.w1 + st * std::sin(phi) * frame.w2 +
                                mu * frame.w3;
        const ThreeVector qv = q * dir;
        const double ep = spinor::electron_energy(k0 + 0.5 * qv);
        const double em = spinor::electron_energy(k0 - 0.5 * qv);
        const double den = q + em - ep;
        // principal-value sliver; scaled with q so the soft region, where the
        // denominator itself is O(q), is not discarded
        if (std::abs(den) < opts.pv_exclusion * std::min(q, 1.0)) continue;
        const FourVector mel =
            spinor::current_vector(lambda, k0 - 0.5 * qv, lambda, k0 + 0.5 * qv);
        const complexd weight = mu_rule.weights[i] * phi_weights * radial_phase *
                                std::polar(1.0, -(ep - em) * t) / den;
        acc = acc + weight * mel;
      }
    }
    // measure q^2/(2pi)^3 with g_q^2 = 2pi/q
    return detail::pack((q / std::pow(2.0 * pi, 2)) * acc);
  };

  specfun::QuadratureSpec head_spec;
  head_spec.abs_tol = opts.abs_tol;
  head_spec.rel_tol = opts.rel_tol;
  head_spec.max_subdivisions = opts.max_radial_subdivisions;

  const double q_switch = std::max(6.0, 2.0 * pi / rn);
  auto head = specfun::integrate(angular, 1e-12, q_switch, head_spec);

  specfun::QuadratureSpec tail_spec = head_spec;
  tail_spec.period_hint = pi / rn;
  tail_spec.max_subdivisions = opts.max_tail_cells;
  auto tail = specfun::integrate(angular, q_switch, std::numeric_limits<double>::infinity(),
                                 tail_spec);
  if (!head.converged || !tail.converged)
    throw std::runtime_error("potential_uniform: mode integral did not converge");

  const FourVector integral = detail::unpack(head.value + tail.value);
  const double e = c.charge();
  // A = 2 e Re{...}; rescale back with one power of the mass
  return FourVector(2.0 * e * c.mass * integral.t.real(),
                    {2.0 * e * c.mass * integral.x.real(), 2.0 * e * c.mass * integral.y.real(),
                     2.0 * e * c.mass * integral.z.real()});
}

//==============================================================================
// Coarse validator: the (t', k, tau) triple-integral reduction of the moving
// non-relativistic potential. The k-independent part recombines exactly into
// the rest-frame potential; the remainder is integrated with a Filon rule in
// k, then in tau and in the retarded time.
struct CoarseFieldResult {
  double a0 = 0.0;
  double error_bar = 0.0;
  bool budget_exceeded = false;
  long evaluations = 0;
};

namespace detail {

// Spherical Bessel j_l(x), l small. Upward recurrence for x > l, series +
// downward recurrence otherwise.
inline void spherical_jl(int lmax, double x, double* out) {
  if (x < 1e-8) {
    double pref = 1.0;
    for (int l = 0; l <= lmax; ++l) {
      out[l] = pref;  // x^l/(2l+1)!! to leading order
      pref *= x / (2.0 * l + 3.0);
    }
    return;
  }
  const double j0 = std::sin(x) / x;
  if (lmax == 0) {
    out[0] = j0;
    return;
  }
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  if (x > lmax + 2.0) {
    out[0] = j0;
    out[1] = j1;
    for (int l = 1; l < lmax; ++l) out[l + 1] = (2.0 * l + 1.0) / x * out[l] - out[l - 1];
    return;
  }
  // Miller downward recurrence, normalized by j0.
  const int start = lmax + 18;
  double jp = 0.0, jc = 1e-30;
  std::vector<double> tmp(start + 1, 0.0);
  for (int l = start; l >= 0; --l) {
    const double jm = (2.0 * l + 3.0) / x * jc - jp;
    jp = jc;
    jc = jm;
    if (l <= lmax) tmp[l] = jc;
    if (std::abs(jc) > 1e250) {
      jp *= 1e-250;
      jc *= 1e-250;
      for (int ll = l; ll <= lmax; ++ll) tmp[ll] *= 1e-250;
    }
  }
  const double scale = j0 / jc;
  for (int l = 0; l <= lmax; ++l) out[l] = tmp[l] * scale;
}

// int_{ka}^{kb} cos(k tau) V(k) dk by Legendre projection of V (degree 8)
// and exact oscillatory moments 2 i^l j_l(sigma).
template <class VF>
double filon_cos_panel(VF&& V, double ka, double kb, double tau) {
  constexpr int kDegree = 8;
  const double hw = 0.5 * (kb - ka);
  const double kc = 0.5 * (ka + kb);
  const double sigma = tau * hw;
  const auto& rule = specfun::gauss_legendre(16);

  if (sigma < 0.5) {  // non-oscillatory on this panel
    double s = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double k = kc + hw * rule.nodes[i];
      s += rule.weights[i] * std::cos(k * tau) * V(k);
    }
    return hw * s;
  }

  // Legendre coefficients c_l = (2l+1)/2 int V P_l
  std::array<double, kDegree + 1> coeff{};
  for (int i = 0; i < 16; ++i) {
    const double u = rule.nodes[i];
    const double w = rule.weights[i];
    const double val = V(kc + hw * u);
    double p0 = 1.0, p1 = u;
    coeff[0] += 0.5 * w * val;
    coeff[1] += 1.5 * w * val * u;
    for (int l = 2; l <= kDegree; ++l) {
      const double p2 = ((2.0 * l - 1.0) * u * p1 - (l - 1.0) * p0) / l;
      coeff[l] += (2.0 * l + 1.0) / 2.0 * w * val * p2;
      p0 = p1;
      p1 = p2;
    }
  }
  double jl[kDegree + 1];
  spherical_jl(kDegree, sigma, jl);
  // Re(e^{i tau kc} * sum_l c_l 2 i^l j_l) with i^l cycling {1, i, -1, -i}
  const double cc = std::cos(tau * kc), ss = std::sin(tau * kc);
  double re_sum = 0.0, im_sum = 0.0;
  for (int l = 0; l <= kDegree; ++l) {
    const double term = 2.0 * coeff[l] * jl[l];
    switch (l % 4) {
      case 0: re_sum += term; break;
      case 1: im_sum += term; break;
      case 2: re_sum -= term; break;
      case 3: im_sum -= term; break;
    }
  }
  return hw * (cc * re_sum - ss * im_sum);
}

}  // namespace detail

inline CoarseFieldResult potential_full_nonrel(const ThreeVector& r_in, double t_in,
                                               const Trajectory& traj_in, const Couplings& c = {},
                                               long max_evaluations = 40000000) {
  traj_in.require_nonrelativistic();
  const double rn_in = norm(r_in);
  if (!(rn_in > 0.0)) throw std::domain_error("potential_full_nonrel: requires |r| > 0");

  // unit-mass internals, same rescaling as potential_uniform
  const double m = 1.0;
  const double mu = 2.0 * m;
  const ThreeVector r = c.mass * r_in;
  const double t = c.mass * t_in;
  Trajectory traj = traj_in;
  traj.origin = c.mass * traj_in.origin;
  const double rn = norm(r);
  const double e = c.charge();
  const ThreeVector v = traj.velocity_or_zero();
  const double vn = norm(v);

  CoarseFieldResult out;

  // k-independent piece: the cosine integral collapses onto tau = 0 with half
  // mass and recombines into the rest-frame potential.
  if (norm(r - traj.position(t)) == 0.0)
    throw std::domain_error("potential_full_nonrel: field point on the charge");
  const double rest_piece = 2.0 * e / (pi * rn) * specfun::k0_cumulative(mu * rn);

  // A charge resting at the coordinate origin has no k-dependent remainder.
  if (vn == 0.0 && norm(traj.origin) == 0.0) {
    out.a0 = c.mass * rest_piece;
    out.error_bar = 1e-10 * std::abs(out.a0);
    return out;
  }

  long evals = 0;
  bool exceeded = false;

  auto bracket = [&](double tau, double s, double D) {
    // [K0(mu|s - tau - D|) - K0(mu|s - tau + D|)] / D
    evals += 2;
    const double x1 = std::abs(s - tau - D);
    const double x2 = std::abs(s - tau + D);
    const double k1 = (x1 < 350.0) ? specfun::bessel_k0(x1 * mu + 1e-300) : 0.0;
    const double k2 = (x2 < 350.0) ? specfun::bessel_k0(x2 * mu + 1e-300) : 0.0;
    return (k1 - k2) / D;
  };

  // W(tau, s) = int_0^inf cos(k tau) [B(tau; D(k,s)) - B(tau; r)] dk
  auto k_transform = [&](double tau, double s, const ThreeVector& x0) {
    const double b_ref = bracket(tau, s, rn);
    auto V = [&](double k) {
      const double xi = 1.0 / std::sqrt(1.0 + 0.25 * k * k / (m * m));
      const double D = norm(r - xi * x0);
      return bracket(tau, s, D) - b_ref;
    };
    double total = 0.0;
    double ka = 0.0, kb = 0.5 * mu;
    const double k_far = std::max(64.0 * mu, 8.0 / std::max(tau, 1e-3));
    int panels = 0;
    double last_v = 0.0, last_k = kb;
    while (ka < k_far && panels < 48) {
      total += detail::filon_cos_panel(V, ka, std::min(kb, k_far), tau);
      last_k = std::min(kb, k_far);
      ka = kb;
      kb *= 2.0;
      ++panels;
    }
    // asymptotic 1/k tail: V ~ a/k, int_K cos(k tau)/k dk ~ sin(K tau)/(K tau)
    last_v = V(last_k);
    const double a_tail = last_v * last_k;
    const double z = last_k * tau;
    if (z > 1.0) {
      total += a_tail * (std::sin(z) / z - std::cos(z) / (z * z));
      out.error_bar += std::abs(a_tail) / (z * z) * 1e-1;
    } else {
      out.error_bar += std::abs(a_tail);
    }
    return total;
  };

  specfun::QuadratureSpec coarse;
  coarse.abs_tol = 1e-9;
  coarse.rel_tol = 2e-4;
  coarse.max_subdivisions = 50;

  const double s_max = (rn + 22.0 / mu) / (1.0 - vn) + 4.0;
  auto s_integrand = [&](double s) {
    if (evals > max_evaluations) {
      exceeded = true;
      return 0.0;
    }
    const ThreeVector x0 = traj.position(t - s);
    const double d0 = norm(r - x0);
    const double tau_max = s + std::max(d0, rn) + 20.0 / mu;
    auto tau_integrand = [&](double tau) { return k_transform(tau, s, x0); };
    auto inner = specfun::integrate(tau_integrand, 1e-4, tau_max, coarse);
    return inner.value;
  };

  specfun::QuadratureSpec outer = coarse;
  outer.max_subdivisions = 40;
  auto correction = specfun::integrate(s_integrand, 0.0, s_max, outer);

  const double pref = 4.0 * e * m / (pi * pi);
  out.a0 = c.mass * (rest_piece + pref * correction.value);
  out.error_bar += c.mass * pref * correction.error_estimate +
                   0.02 * std::abs(c.mass * pref * correction.value) + 1e-9;
  out.budget_exceeded = exceeded;
  out.evaluations = evals;
  if (exceeded) out.error_bar += 0.5 * std::abs(out.a0);
  return out;
}

}  // namespace dressed::meanfield
