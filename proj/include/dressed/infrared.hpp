#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dressed/core.hpp"
#include "dressed/quadrature.hpp"
#include "dressed/spinor.hpp"

namespace dressed::infrared {

//==============================================================================
// A soft collision: velocity v1 before, v2 after, |v1 - v2| small against v1.
struct CollisionSpec {
  ThreeVector v1{};
  ThreeVector v2{};
  double mass = 1.0;
  double e2 = default_alpha;

  void validate() const {
    if (norm(v1) >= 1.0 || norm(v2) >= 1.0)
      throw std::domain_error("CollisionSpec: velocities must be subluminal");
    if (norm(v1 - v2) > 0.2 * norm(v1) + 1e-300)
      throw std::domain_error("CollisionSpec: requires |v1 - v2| <= 0.2 |v1|");
  }
};

struct SpectrumSample {
  double omega = 0.0;
  ThreeVector direction{};
  int alpha = 1;  // transverse index, 1 or 2
  double n = 0.0;
};

struct DeltaResult {
  double delta = 0.0;
  double first_iterate = 0.0;
  int iterations = 0;
  std::vector<double> trace;
};

struct DeltaConvergenceError : std::runtime_error {
  std::vector<double> trace;
  DeltaConvergenceError(const std::string& what, std::vector<double> tr)
      : std::runtime_error(what), trace(std::move(tr)) {}
};

namespace detail {

// F(Delta): the reaction-shift integral at a trial Delta,
//   (e^2/pi) int_0^inf q dq int_{-1}^{1} dmu p0^2 (1 - mu^2) /
//                          (eps+ eps- (q + Delta - eps+ + eps-))
// with eps+- = sqrt(m^2 + (p0 +- q/2)^2) evaluated on the collinear geometry.
inline double delta_map(double p0, double m, double e2, double delta) {
  const auto& mu_rule = specfun::gauss_legendre(40);
  auto radial = [&](double q) {
    double angular = 0.0;
    for (std::size_t i = 0; i < mu_rule.nodes.size(); ++i) {
      const double mu = mu_rule.nodes[i];
      const double ep = std::sqrt(m * m + p0 * p0 + 0.25 * q * q + p0 * q * mu);
      const double em = std::sqrt(m * m + p0 * p0 + 0.25 * q * q - p0 * q * mu);
      angular += mu_rule.weights[i] * p0 * p0 * (1.0 - mu * mu) /
                 (ep * em * (q + delta - ep + em));
    }
    return q * angular;
  };
  specfun::QuadratureSpec spec;
  spec.abs_tol = 1e-14;
  spec.rel_tol = 1e-12;
  spec.max_subdivisions = 400;
  auto r = specfun::integrate(radial, 0.0, std::numeric_limits<double>::infinity(), spec);
  if (!r.converged) throw std::runtime_error("delta_shift: radial quadrature failed");
  return e2 / pi * r.value;
}

}  // namespace detail

//==============================================================================
//! Self-consistent infrared shift: the fixed point of Delta = F(Delta),
//! reached by damped iteration from the non-relativistic seed (4/3) e^2 m v1^2.
inline DeltaResult delta_shift(const CollisionSpec& spec, double rel_tol = 1e-10,
                               int max_iterations = 200) {
  spec.validate();
  const double v1 = norm(spec.v1);
  if (v1 >= 0.3)
    throw std::domain_error("delta_shift: non-relativistic validity requires |v1| < 0.3");

  DeltaResult out;
  if (v1 == 0.0) return out;  // the numerator vanishes identically

  const double p0 = spec.mass * v1 / std::sqrt(1.0 - v1 * v1);
  double delta = 4.0 / 3.0 * spec.e2 * spec.mass * v1 * v1;
  out.trace.push_back(delta);
  for (int it = 0; it < max_iterations; ++it) {
    const double mapped = detail::delta_map(p0, spec.mass, spec.e2, delta);
    if (it == 0) out.first_iterate = mapped;
    const double next = 0.5 * delta + 0.5 * mapped;  // damped update
    out.trace.push_back(next);
    out.iterations = it + 1;
    const double change = std::abs(next - delta);
    delta = next;
    if (change <= rel_tol * std::abs(delta)) {
      out.delta = delta;
      return out;
    }
  }
  throw DeltaConvergenceError("delta_shift: no fixed point after " +
                                  std::to_string(max_iterations) + " iterations",
                              out.trace);
}

//==============================================================================
//! Photon numbers (n1, n2) for the two transverse polarizations of the mode
//! with energy omega along the given direction.
inline std::pair<double, double> photon_spectrum(const CollisionSpec& spec, double omega,
                                                 const ThreeVector& direction, double delta) {
  spec.validate();
  if (!(omega > 0.0)) throw std::domain_error("photon_spectrum: requires omega > 0");
  if (delta < 0.0) throw std::domain_error("photon_spectrum: requires Delta >= 0");

  const ThreeVector n = normalized(direction);
  const ThreeVector q = omega * n;
  const double d2 = omega - dot(q, spec.v2) + delta;
  const double d1 = omega - dot(q, spec.v1) + delta;
  if (d1 == 0.0 || d2 == 0.0)
    throw std::domain_error("photon_spectrum: classical pole at Delta = 0");

  const auto basis = spinor::polarization_basis(q);
  const double g2 = 2.0 * pi / omega;
  std::pair<double, double> out;
  for (int alpha : {1, 2}) {
    const ThreeVector e = basis.e[alpha].spatial_real();
    const double amp = dot(e, spec.v2) / d2 - dot(e, spec.v1) / d1;
    (alpha == 1 ? out.first : out.second) = spec.e2 * g2 * amp * amp;
  }
  return out;
}

//! Per-mode number summed over transverse polarizations and directions,
//! int dOmega sum_alpha n; scales like 1/omega^3 in the classical regime.
inline double angular_number(const CollisionSpec& spec, double omega, double delta,
                             int n_cos = 32, int n_phi = 64) {
  const auto& mu_rule = specfun::gauss_legendre(n_cos);
  const double wphi = 2.0 * pi / n_phi;
  double sum = 0.0;
  for (int i = 0; i < n_cos; ++i) {
    const double mu = mu_rule.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    for (int j = 0; j < n_phi; ++j) {
      const double phi = wphi * j;
      const ThreeVector dir{st * std::cos(phi), st * std::sin(phi), mu};
      const auto [n1, n2] = photon_spectrum(spec, omega, dir, delta);
      sum += mu_rule.weights[i] * wphi * (n1 + n2);
    }
  }
  return sum;
}

//! Photon number per unit omega: the angular sum with the mode-space measure
//! omega^2/(2pi)^3 attached.
inline double spectral_density(const CollisionSpec& spec, double omega, double delta,
                               int n_cos = 32, int n_phi = 64) {
  return omega * omega / std::pow(2.0 * pi, 3) * angular_number(spec, omega, delta, n_cos, n_phi);
}

//==============================================================================
//! Total photon number in the shell omega_min < omega < omega_max.
inline double total_photon_number(const CollisionSpec& spec, double delta, double omega_min,
                                  double omega_max, int n_cos = 32, int n_phi = 64) {
  spec.validate();
  if (!(omega_min > 0.0 && omega_min < omega_max))
    throw std::domain_error("total_photon_number: requires 0 < omega_min < omega_max");
  if (norm(spec.v1 - spec.v2) == 0.0) return 0.0;

  // integrate in log(omega): decades of soft photons carry equal weight
  specfun::QuadratureSpec qspec;
  qspec.abs_tol = 1e-15;
  qspec.rel_tol = 1e-9;
  qspec.max_subdivisions = 300;
  auto integrand = [&](double u) {
    const double w = std::exp(u);
    return w * spectral_density(spec, w, delta, n_cos, n_phi);
  };
  auto r = specfun::integrate(integrand, std::log(omega_min), std::log(omega_max), qspec);
  if (!r.converged) throw std::runtime_error("total_photon_number: quadrature failed");
  return r.value;
}

}  // namespace dressed::infrared
