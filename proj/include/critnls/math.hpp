#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace critnls {

inline constexpr double pi = 3.14159265358979323846;

// Surface area of the unit sphere S^{N-1} in R^N.
inline double unit_sphere_area(int N) {
  return 2.0 * std::pow(pi, 0.5 * N) / std::tgamma(0.5 * N);
}

inline double ball_volume(int N, double R) {
  return unit_sphere_area(N) * std::pow(R, N) / N;
}

// C^2 quintic step: 0 for t<=0, 1 for t>=1, monotone in between.
inline double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// Tridiagonal solve with partial pivoting (dgtsv-style). Bands are
// overwritten. lower[0] and upper[n-1] are unused.
inline std::vector<double> solve_tridiag(std::vector<double> lower,
                                         std::vector<double> diag,
                                         std::vector<double> upper,
                                         std::vector<double> rhs) {
  const std::size_t n = diag.size();
  if (n == 0) return {};
  std::vector<double> extra(n, 0.0);  // fill-in one band above 'upper'
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(lower[i + 1]) > std::abs(diag[i])) {
      std::swap(diag[i], lower[i + 1]);
      std::swap(upper[i], diag[i + 1]);
      if (i + 2 < n) std::swap(extra[i], upper[i + 1]);
      std::swap(rhs[i], rhs[i + 1]);
    }
    if (diag[i] == 0.0) throw std::runtime_error("solve_tridiag: singular matrix");
    const double m = lower[i + 1] / diag[i];
    diag[i + 1] -= m * upper[i];
    if (i + 2 < n) upper[i + 1] -= m * extra[i];
    rhs[i + 1] -= m * rhs[i];
  }
  if (diag[n - 1] == 0.0) throw std::runtime_error("solve_tridiag: singular matrix");
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  if (n >= 2) {
    const std::size_t i = n - 2;
    x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  }
  for (std::size_t k = n; k >= 3; --k) {
    const std::size_t i = k - 3;
    x[i] = (rhs[i] - upper[i] * x[i + 1] - extra[i] * x[i + 2]) / diag[i];
  }
  return x;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;  // 95% half-width is ~2x this for small samples
  double rss = 0.0;
};

// Ordinary least squares y = intercept + slope*x.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need >= 2 points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.rss += r * r;
  }
  if (n > 2) f.slope_stderr = std::sqrt(f.rss / (n - 2) / sxx);
  return f;
}

// FNV-1a, used to stamp reports with the config bytes they came from.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Deterministic RNG. Keeps report replay independent of the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace critnls
