#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace dressed {

using complexd = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double euler_gamma = 0.577215664901532860606512090082402431;

// Default squared charge; overridable everywhere it enters.
inline constexpr double default_alpha = 1.0 / 137.035999;

//==============================================================================
// Cartesian 3-vector. Momenta are in units of m, lengths in 1/m.
struct ThreeVector {
  double x = 0.0, y = 0.0, z = 0.0;

  ThreeVector operator+(const ThreeVector& o) const { return {x + o.x, y + o.y, z + o.z}; }
  ThreeVector operator-(const ThreeVector& o) const { return {x - o.x, y - o.y, z - o.z}; }
  ThreeVector operator-() const { return {-x, -y, -z}; }
  ThreeVector& operator+=(const ThreeVector& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
};

inline ThreeVector operator*(double s, const ThreeVector& v) { return {s * v.x, s * v.y, s * v.z}; }
inline ThreeVector operator*(const ThreeVector& v, double s) { return s * v; }
inline double dot(const ThreeVector& a, const ThreeVector& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline ThreeVector cross(const ThreeVector& a, const ThreeVector& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const ThreeVector& v) { return dot(v, v); }
inline double norm(const ThreeVector& v) { return std::sqrt(norm2(v)); }
inline ThreeVector normalized(const ThreeVector& v) {
  const double n = norm(v);
  if (n == 0.0) throw std::domain_error("normalized: zero vector has no direction");
  return (1.0 / n) * v;
}

//==============================================================================
// Contravariant 4-vector with metric (+,-,-,-). Components are complex so the
// same type carries real potentials and complex current amplitudes.
struct FourVector {
  complexd t{}, x{}, y{}, z{};

  FourVector() = default;
  FourVector(complexd t_, complexd x_, complexd y_, complexd z_) : t(t_), x(x_), y(y_), z(z_) {}
  FourVector(complexd t_, const ThreeVector& s) : t(t_), x(s.x), y(s.y), z(s.z) {}

  FourVector operator+(const FourVector& o) const { return {t + o.t, x + o.x, y + o.y, z + o.z}; }
  FourVector operator-(const FourVector& o) const { return {t - o.t, x - o.x, y - o.y, z - o.z}; }

  ThreeVector spatial_real() const { return {x.real(), y.real(), z.real()}; }

  complexd component(int mu) const {
    switch (mu) {
      case 0: return t;
      case 1: return x;
      case 2: return y;
      case 3: return z;
      default: throw std::domain_error("FourVector::component: index must be 0..3");
    }
  }
};

inline FourVector operator*(complexd s, const FourVector& v) {
  return {s * v.t, s * v.x, s * v.y, s * v.z};
}

// Bilinear Minkowski product a^mu b_mu.
inline complexd minkowski_dot(const FourVector& a, const FourVector& b) {
  return a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z;
}

// Sesquilinear contraction conj(a)^mu b_mu, as used for polarization vectors.
inline complexd minkowski_dot_conj(const FourVector& a, const FourVector& b) {
  return std::conj(a.t) * b.t - std::conj(a.x) * b.x - std::conj(a.y) * b.y - std::conj(a.z) * b.z;
}

//==============================================================================
// Charge and mass entering the field formulas. e2 is the squared charge
// (fine-structure constant in relativistic units); mass in electron masses.
struct Couplings {
  double e2 = default_alpha;
  double mass = 1.0;

  double charge() const { return std::sqrt(e2); }
};

}  // namespace dressed
