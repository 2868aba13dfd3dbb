#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <type_traits>
#include <utility>
#include <vector>

#include "dressed/core.hpp"

namespace dressed::specfun {

enum class RangeMapping { none, semi_infinite_exp, semi_infinite_tan };

struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 400;
  RangeMapping mapping = RangeMapping::none;
  // Half-period of an oscillatory integrand. When > 0 the range is split into
  // cells of this length; infinite tails are summed with Euler acceleration.
  double period_hint = 0.0;
};

template <class T>
struct QuadratureResult {
  T value{};
  double error_estimate = 0.0;
  int subdivisions_used = 0;
  bool converged = false;
};

// Thrown when the integrand returns a non-finite sample.
struct EvaluationError : std::runtime_error {
  double abscissa;
  explicit EvaluationError(double x)
      : std::runtime_error("integrand returned a non-finite value at x = " + std::to_string(x)),
        abscissa(x) {}
};

// Fixed-size accumulator so several moments of one integrand share the same
// adaptive partition (refinement is driven by the largest component).
template <int N>
struct Accum {
  std::array<double, N> v{};

  Accum operator+(const Accum& o) const {
    Accum r;
    for (int i = 0; i < N; ++i) r.v[i] = v[i] + o.v[i];
    return r;
  }
  Accum operator-(const Accum& o) const {
    Accum r;
    for (int i = 0; i < N; ++i) r.v[i] = v[i] - o.v[i];
    return r;
  }
  Accum& operator+=(const Accum& o) {
    for (int i = 0; i < N; ++i) v[i] += o.v[i];
    return *this;
  }
};

template <int N>
Accum<N> operator*(double s, const Accum<N>& a) {
  Accum<N> r;
  for (int i = 0; i < N; ++i) r.v[i] = s * a.v[i];
  return r;
}

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const complexd& v) { return std::abs(v); }
template <int N>
double magnitude(const Accum<N>& a) {
  double m = 0.0;
  for (int i = 0; i < N; ++i) m = std::max(m, std::abs(a.v[i]));
  return m;
}

inline bool finite_sample(double v) { return std::isfinite(v); }
inline bool finite_sample(const complexd& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}
template <int N>
bool finite_sample(const Accum<N>& a) {
  for (int i = 0; i < N; ++i)
    if (!std::isfinite(a.v[i])) return false;
  return true;
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
inline constexpr std::array<double, 8> kGkNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T, class F>
void gk15(F& f, double a, double b, T& result, double& error) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  auto eval = [&](double x) -> T {
    T v = f(x);
    if (!finite_sample(v)) throw EvaluationError(x);
    return v;
  };

  T fc = eval(center);
  T kronrod = kKronrodWeights[7] * fc;
  T gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGkNodes[i];
    T f1 = eval(center - dx);
    T f2 = eval(center + dx);
    kronrod += kKronrodWeights[i] * (f1 + f2);
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * (f1 + f2);
  }
  result = half * kronrod;
  // QUADPACK-style inflation of the raw Gauss/Kronrod difference.
  const double diff = magnitude(half * (kronrod - gauss));
  const double scale = magnitude(result) + 1e-300;
  error = std::min(diff, std::pow(200.0 * diff / scale, 1.5) * scale);
  error = std::max(error, std::numeric_limits<double>::epsilon() * 50.0 * scale);
  error = std::max(error, diff * 1e-6);
  if (diff < 1e-290) error = diff;
}

struct Interval {
  double a, b;
  double error;
};

// Adaptive bisection on a finite range, worst interval first.
template <class T, class F>
QuadratureResult<T> adaptive(F f, double a, double b, const QuadratureSpec& spec) {
  QuadratureResult<T> out;
  std::vector<Interval> heap;
  std::vector<T> values;

  T v0;
  double e0;
  gk15(f, a, b, v0, e0);
  heap.push_back({a, b, e0});
  values.push_back(v0);

  auto total = [&]() {
    T s{};
    for (const auto& v : values) s += v;
    return s;
  };
  auto total_error = [&]() {
    double s = 0.0;
    for (const auto& iv : heap) s += iv.error;
    return s;
  };

  int splits = 0;
  while (true) {
    T sum = total();
    const double err = total_error();
    const double tol = std::max(spec.abs_tol, spec.rel_tol * magnitude(sum));
    if (err <= tol) {
      out.value = sum;
      out.error_estimate = err;
      out.subdivisions_used = splits;
      out.converged = true;
      return out;
    }
    if (splits >= spec.max_subdivisions) {
      out.value = sum;
      out.error_estimate = err;
      out.subdivisions_used = splits;
      out.converged = false;
      return out;
    }
    // Deterministic choice: largest error, earliest index wins ties.
    std::size_t worst = 0;
    for (std::size_t i = 1; i < heap.size(); ++i)
      if (heap[i].error > heap[worst].error) worst = i;

    const Interval iv = heap[worst];
    const double mid = 0.5 * (iv.a + iv.b);
    T vl, vr;
    double el, er;
    gk15(f, iv.a, mid, vl, el);
    gk15(f, mid, iv.b, vr, er);
    heap[worst] = {iv.a, mid, el};
    values[worst] = vl;
    heap.push_back({mid, iv.b, er});
    values.push_back(vr);
    ++splits;
  }
}

// Iterated averaging of partial sums (Euler transformation). Expects the
// partial sums of an eventually alternating sequence of cell integrals.
template <class T>
T euler_accelerate(const std::vector<T>& partial_sums, double* spread = nullptr) {
  std::vector<T> row = partial_sums;
  T prev = row.back();
  while (row.size() > 1) {
    for (std::size_t i = 0; i + 1 < row.size(); ++i) row[i] = 0.5 * (row[i] + row[i + 1]);
    row.pop_back();
    if (spread) *spread = magnitude(row.back() - prev);
    prev = row.back();
  }
  return row.front();
}

}  // namespace detail

//==============================================================================
// Adaptive quadrature of f over [a, b], b possibly infinite. Endpoint
// behaviour and oscillation are declared through the spec (mapping and
// period_hint); results are deterministic for identical inputs.
template <class F, class T = std::invoke_result_t<F, double>>
QuadratureResult<T> integrate(F f, double a, double b, const QuadratureSpec& spec = {}) {
  if (std::isinf(b)) {
    if (spec.period_hint > 0.0) {
      // Sum half-period cells; Euler-accelerate the alternating partial sums.
      const double h = spec.period_hint;
      QuadratureSpec cell_spec = spec;
      cell_spec.period_hint = 0.0;
      cell_spec.mapping = RangeMapping::none;
      cell_spec.max_subdivisions = std::max(20, spec.max_subdivisions / 16);

      QuadratureResult<T> out;
      std::vector<T> partial;
      T direct{};
      double cell_err = 0.0;
      const int max_cells = std::max(64, spec.max_subdivisions);
      int warmup = 4;  // cells summed directly before acceleration starts
      std::vector<T> accel_window;
      T prev_accel{};
      bool have_prev = false;
      for (int j = 0; j < max_cells; ++j) {
        auto cell = detail::adaptive<T>(f, a + j * h, a + (j + 1) * h, cell_spec);
        out.subdivisions_used += cell.subdivisions_used + 1;
        cell_err += cell.error_estimate;
        if (j < warmup) {
          direct += cell.value;
          continue;
        }
        if (accel_window.empty())
          accel_window.push_back(cell.value);
        else
          accel_window.push_back(accel_window.back() + cell.value);
        if (accel_window.size() < 3) continue;
        double spread = 0.0;
        T tail = detail::euler_accelerate(accel_window, &spread);
        const T estimate = direct + tail;
        const double tol = std::max(spec.abs_tol, spec.rel_tol * detail::magnitude(estimate));
        if (have_prev && detail::magnitude(estimate - prev_accel) + spread < tol) {
          out.value = estimate;
          out.error_estimate = detail::magnitude(estimate - prev_accel) + spread + cell_err;
          out.converged = true;
          return out;
        }
        prev_accel = estimate;
        have_prev = true;
      }
      out.value = have_prev ? prev_accel : direct;
      out.error_estimate = cell_err + (have_prev ? detail::magnitude(prev_accel - direct) : 0.0);
      out.converged = false;
      return out;
    }

    // Map the semi-infinite range onto u in [0, 1).
    std::function<double(double)> map, jac;
    switch (spec.mapping) {
      case RangeMapping::semi_infinite_exp:
        map = [a](double u) { return a - std::log1p(-u); };
        jac = [](double u) { return 1.0 / (1.0 - u); };
        break;
      case RangeMapping::semi_infinite_tan:
        map = [a](double u) { return a + std::tan(0.5 * pi * u); };
        jac = [](double u) {
          const double t = std::tan(0.5 * pi * u);
          return 0.5 * pi * (1.0 + t * t);
        };
        break;
      case RangeMapping::none:
      default:
        map = [a](double u) { return a + u / (1.0 - u); };
        jac = [](double u) { return 1.0 / ((1.0 - u) * (1.0 - u)); };
        break;
    }
    auto g = [&](double u) -> T { return static_cast<T>(jac(u) * f(map(u))); };
    QuadratureSpec inner = spec;
    inner.mapping = RangeMapping::none;
    inner.period_hint = 0.0;
    return detail::adaptive<T>(g, 0.0, 1.0, inner);
  }

  if (!(a < b)) throw std::invalid_argument("integrate: requires a < b");

  if (spec.period_hint > 0.0 && (b - a) > spec.period_hint) {
    // Finite oscillatory range: accumulate half-period cells in order.
    const double h = spec.period_hint;
    QuadratureSpec cell_spec = spec;
    cell_spec.period_hint = 0.0;
    const int n_cells = static_cast<int>(std::ceil((b - a) / h));
    cell_spec.max_subdivisions = std::max(15, spec.max_subdivisions / n_cells + 8);
    QuadratureResult<T> out;
    out.converged = true;
    for (int j = 0; j < n_cells; ++j) {
      const double ca = a + j * h;
      const double cb = std::min(b, a + (j + 1) * h);
      if (cb <= ca) break;
      auto cell = detail::adaptive<T>(f, ca, cb, cell_spec);
      out.value += cell.value;
      out.error_estimate += cell.error_estimate;
      out.subdivisions_used += cell.subdivisions_used + 1;
      out.converged = out.converged && cell.converged;
    }
    return out;
  }

  return detail::adaptive<T>(f, a, b, spec);
}

//==============================================================================
// Fixed nodes for angular grids and Gaussian averages.

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1]; cached per order.
inline const Rule& gauss_legendre(int n) {
  static std::map<int, Rule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    long double x = std::cos(pi * (i + 0.75L) / (n + 0.5L));
    long double p0, p1, dp;
    for (int iter = 0; iter < 100; ++iter) {
      p0 = 1.0L;
      p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0L);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::abs((double)dx) < 1e-17) break;
    }
    const double w = (double)(2.0L / ((1.0L - x * x) * dp * dp));
    rule.nodes[i] = (double)(-x);
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = (double)x;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

// Gauss-Hermite rule for weight exp(-x^2); cached per order.
inline const Rule& gauss_hermite(int n) {
  static std::map<int, Rule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const long double sqrt_pi = 1.77245385090551602729816748334114518L;
  // Largest zero estimate, then march inward (Stroud-Secrest style guesses).
  long double x = 0.0L;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0)
      x = std::sqrt((long double)(2 * n + 1)) - 1.85575L * std::pow((long double)(2 * n + 1), -1.0L / 6.0L);
    else if (i == 1)
      x -= 1.14L * std::pow((long double)n, 0.426L) / x;
    else if (i == 2)
      x = 1.86L * x - 0.86L * rule.nodes[n - 1];
    else if (i == 3)
      x = 1.91L * x - 0.91L * rule.nodes[n - 2];
    else
      x = 2.0L * x - rule.nodes[n - i + 1];

    long double h0, h1, dh = 1.0L;
    for (int iter = 0; iter < 200; ++iter) {
      // Normalized Hermite recurrence keeps values in range.
      h0 = std::pow(pi, -0.25L);
      h1 = x * std::sqrt(2.0L) * h0;
      for (int k = 2; k <= n; ++k) {
        const long double h2 =
            x * std::sqrt(2.0L / k) * h1 - std::sqrt((k - 1.0L) / k) * h0;
        h0 = h1;
        h1 = h2;
      }
      dh = std::sqrt(2.0L * n) * h0;  // derivative of normalized H_n
      const long double dx = h1 / dh;
      x -= dx;
      if (std::abs((double)dx) < 1e-18) break;
    }
    const double w = (double)(2.0L / (dh * dh));
    rule.nodes[n - 1 - i] = (double)x;
    rule.weights[n - 1 - i] = w;
    rule.nodes[i] = (double)(-x);
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  (void)sqrt_pi;
  return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace dressed::specfun
