#pragma once

// Test-side oracles, independent of the library quadrature and solvers.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

// composite Simpson on [a,b] with n (even) intervals
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  return s * h / 3.0;
}

// classical closed form of the best Sobolev constant
inline double sobolev_closed_form(int N) {
  return pi * N * (N - 2.0) * std::pow(std::tgamma(0.5 * N) / std::tgamma(double(N)), 2.0 / N);
}

// Ground eigenvalue of -Laplace - eta*chi_{B_1} in R^3 from the s-wave
// matching condition k cot k = -sqrt(eta - k^2); needs eta > pi^2/4.
inline double square_well_ground_energy(double eta) {
  if (!(eta > pi * pi / 4.0)) throw std::invalid_argument("no bound state");
  auto f = [&](double k) { return k * std::cos(k) / std::sin(k) + std::sqrt(eta - k * k); };
  double lo = pi / 2.0 + 1e-12, hi = std::min(pi - 1e-12, std::sqrt(eta) - 1e-12);
  if (f(lo) <= 0.0 || f(hi) >= 0.0) throw std::runtime_error("bracket failure");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  const double k = 0.5 * (lo + hi);
  return k * k - eta;
}

}  // namespace oracle
