#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "critnls/math.hpp"

namespace critnls {

namespace detail {

// Rayleigh quotient |grad U|_2^2 / |U|_{2*}^2 of the extremal profile
// U = [N(N-2)]^{(N-2)/4} (1+r^2)^{-(N-2)/2}, integrated in log r with
// trapezoid sums at two resolutions and Richardson extrapolation.
inline double sobolev_from_profile(int N, std::size_t m) {
  const double c = std::pow(double(N) * (N - 2), 0.25 * (N - 2));
  const double tstar = 2.0 * N / (N - 2.0);
  const double omega = unit_sphere_area(N);
  const double L = 35.0;
  auto trap = [&](std::size_t pts, auto&& f) {
    const double dy = 2.0 * L / static_cast<double>(pts);
    double s = 0.5 * (f(-L) + f(L));
    for (std::size_t i = 1; i < pts; ++i) s += f(-L + dy * static_cast<double>(i));
    return s * dy;
  };
  auto grad_integrand = [&](double y) {
    const double r = std::exp(y);
    const double g = (N - 2.0) * c * r / std::pow(1.0 + r * r, 0.5 * N);
    return g * g * std::pow(r, N - 1) * r;  // extra r from dr = r dy
  };
  auto crit_integrand = [&](double y) {
    const double r = std::exp(y);
    const double u = c / std::pow(1.0 + r * r, 0.5 * (N - 2));
    return std::pow(u, tstar) * std::pow(r, N - 1) * r;
  };
  auto richardson = [&](auto&& f) {
    const double coarse = trap(m, f), fine = trap(2 * m, f);
    return (4.0 * fine - coarse) / 3.0;
  };
  const double grad = omega * richardson(grad_integrand);
  const double crit = omega * richardson(crit_integrand);
  return grad / std::pow(crit, 2.0 / tstar);
}

}  // namespace detail

// Best constant of the embedding D^{1,2} -> L^{2*}; evaluated once per
// dimension and cached.
inline double sobolev_constant(int N) {
  if (N < 3 || N > 5) throw std::invalid_argument("sobolev_constant: N must be 3, 4 or 5");
  static const std::array<double, 3> cache = {
      detail::sobolev_from_profile(3, 20000),
      detail::sobolev_from_profile(4, 20000),
      detail::sobolev_from_profile(5, 20000),
  };
  return cache[static_cast<std::size_t>(N - 3)];
}

}  // namespace critnls
