#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "critnls/math.hpp"

namespace critnls {

enum class GridKind { RadialLog, RadialUniform, BoxUniform };

inline std::string to_string(GridKind k) {
  switch (k) {
    case GridKind::RadialLog: return "radial-log-spaced";
    case GridKind::RadialUniform: return "radial-uniform";
    case GridKind::BoxUniform: return "box-uniform";
  }
  return "?";
}

inline GridKind grid_kind_from_string(const std::string& s) {
  if (s == "radial-log-spaced" || s == "radial-log") return GridKind::RadialLog;
  if (s == "radial-uniform") return GridKind::RadialUniform;
  if (s == "box-uniform") return GridKind::BoxUniform;
  throw std::invalid_argument("unknown grid kind: " + s);
}

// Truncated discretization of R^N. Radial kinds store nodes r_i inside
// finite-volume cells (b_i, b_{i+1}); the box kind is a cell-centered
// uniform cube [-R_max, R_max]^3. Immutable after construction.
struct Domain {
  int N = 3;
  GridKind kind = GridKind::RadialLog;
  double R_max = 0.0;
  std::size_t n = 0;  // total node count

  // radial kinds
  std::vector<double> r;     // node radii, size n
  std::vector<double> b;     // cell boundaries, size n+1, b[0]=0, b[n]=R_max
  std::vector<double> fc;    // face conductances, size n+1, fc[0]=0
  double q = 0.0;            // log grids: r[i+1]/r[i]
  double logq = 0.0;

  // box kind
  std::size_t nside = 0;
  double hbox = 0.0;

  std::vector<double> w;     // quadrature weights, size n
  std::vector<double> absx;  // |x| per node, size n

  double sphere_area = 0.0;  // |S^{N-1}|

  bool radial() const { return kind != GridKind::BoxUniform; }

  std::size_t box_index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * nside + j) * nside + k;
  }
  double box_coord(std::size_t i) const { return -R_max + (i + 0.5) * hbox; }
  std::array<double, 3> coords(std::size_t idx) const {
    if (radial()) return {r[idx], 0.0, 0.0};
    const std::size_t k = idx % nside, j = (idx / nside) % nside, i = idx / (nside * nside);
    return {box_coord(i), box_coord(j), box_coord(k)};
  }
};

using DomainPtr = std::shared_ptr<const Domain>;

struct Field {
  DomainPtr dom;
  std::vector<double> v;

  Field() = default;
  explicit Field(DomainPtr d) : dom(std::move(d)), v(dom->n, 0.0) {}
  Field(DomainPtr d, std::vector<double> vals) : dom(std::move(d)), v(std::move(vals)) {
    if (v.size() != dom->n) throw std::invalid_argument("Field: value count mismatch");
  }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  std::size_t size() const { return v.size(); }
};

inline void require_same_domain(const Field& a, const Field& b) {
  if (a.dom.get() != b.dom.get()) throw std::invalid_argument("domain mismatch");
}

inline DomainPtr build_domain(int N, GridKind kind, double R_max, std::size_t n,
                              double r_min_ratio = 1e-5) {
  if (N < 3 || N > 5) throw std::invalid_argument("build_domain: N must be 3, 4 or 5");
  if (kind == GridKind::BoxUniform && N != 3)
    throw std::invalid_argument("build_domain: box grids only for N=3");
  if (!(R_max > 0.0)) throw std::invalid_argument("build_domain: R_max must be positive");
  if (n < 16) throw std::invalid_argument("build_domain: need n >= 16");

  auto d = std::make_shared<Domain>();
  d->N = N;
  d->kind = kind;
  d->R_max = R_max;
  d->sphere_area = unit_sphere_area(N);

  if (kind == GridKind::BoxUniform) {
    d->nside = n;
    d->n = n * n * n;
    d->hbox = 2.0 * R_max / static_cast<double>(n);
    d->w.assign(d->n, d->hbox * d->hbox * d->hbox);
    d->absx.resize(d->n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          const double x = d->box_coord(i), y = d->box_coord(j), z = d->box_coord(k);
          d->absx[d->box_index(i, j, k)] = std::sqrt(x * x + y * y + z * z);
        }
    return d;
  }

  d->n = n;
  d->r.resize(n);
  d->b.resize(n + 1);
  if (kind == GridKind::RadialLog) {
    if (!(r_min_ratio > 0.0 && r_min_ratio < 0.5))
      throw std::invalid_argument("build_domain: r_min_ratio out of range");
    const double rmin = R_max * r_min_ratio;
    d->q = std::pow(R_max / rmin, 1.0 / static_cast<double>(n));
    d->logq = std::log(d->q);
    d->b[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) d->b[i] = rmin * std::pow(d->q, double(i));
    d->b[n] = R_max;  // pin against rounding
    for (std::size_t i = 0; i < n; ++i) d->r[i] = rmin * std::pow(d->q, double(i) + 0.5);
  } else {
    const double h = R_max / static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i) d->b[i] = double(i) * h;
    d->b[n] = R_max;
    for (std::size_t i = 0; i < n; ++i) d->r[i] = (double(i) + 0.5) * h;
  }

  const double omega = d->sphere_area;
  d->w.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    d->w[i] = omega / N * (std::pow(d->b[i + 1], N) - std::pow(d->b[i], N));
  d->fc.assign(n + 1, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    d->fc[i] = omega * std::pow(d->b[i], N - 1) / (d->r[i] - d->r[i - 1]);
  d->fc[n] = omega * std::pow(R_max, N - 1) / (R_max - d->r[n - 1]);
  d->absx = d->r;
  return d;
}

// ---- quadrature -----------------------------------------------------------

inline double integrate(const Field& f) {
  const auto& d = *f.dom;
  double s = 0.0;
  for (std::size_t i = 0; i < d.n; ++i) s += d.w[i] * f.v[i];
  return s;
}

inline double inner(const Field& f, const Field& g) {
  require_same_domain(f, g);
  const auto& d = *f.dom;
  double s = 0.0;
  for (std::size_t i = 0; i < d.n; ++i) s += d.w[i] * f.v[i] * g.v[i];
  return s;
}

inline double mass(const Field& f) { return inner(f, f); }         // ||f||_2^2
inline double l2_norm(const Field& f) { return std::sqrt(mass(f)); }

inline double l2_distance(const Field& f, const Field& g) {
  require_same_domain(f, g);
  const auto& d = *f.dom;
  double s = 0.0;
  for (std::size_t i = 0; i < d.n; ++i) {
    const double t = f.v[i] - g.v[i];
    s += d.w[i] * t * t;
  }
  return std::sqrt(s);
}

// ---- Dirichlet energy and Laplacian ---------------------------------------

// Discrete bilinear form int grad(u).grad(v); adjoint to apply_neg_laplacian
// in the weighted inner product by construction.
inline double dirichlet_form(const Field& u, const Field& v) {
  require_same_domain(u, v);
  const auto& d = *u.dom;
  double s = 0.0;
  if (d.radial()) {
    const std::size_t n = d.n;
    for (std::size_t i = 1; i < n; ++i)
      s += d.fc[i] * (u.v[i] - u.v[i - 1]) * (v.v[i] - v.v[i - 1]);
    s += d.fc[n] * u.v[n - 1] * v.v[n - 1];
    return s;
  }
  const std::size_t ns = d.nside;
  const double h = d.hbox;
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < ns; ++j)
      for (std::size_t k = 0; k < ns; ++k) {
        const std::size_t p = d.box_index(i, j, k);
        if (i + 1 < ns) {
          const std::size_t q = d.box_index(i + 1, j, k);
          s += (u.v[q] - u.v[p]) * (v.v[q] - v.v[p]) * h;
        }
        if (j + 1 < ns) {
          const std::size_t q = d.box_index(i, j + 1, k);
          s += (u.v[q] - u.v[p]) * (v.v[q] - v.v[p]) * h;
        }
        if (k + 1 < ns) {
          const std::size_t q = d.box_index(i, j, k + 1);
          s += (u.v[q] - u.v[p]) * (v.v[q] - v.v[p]) * h;
        }
        // Dirichlet walls contribute through the half-cell gradient
        double wall = 0.0;
        if (i == 0 || i + 1 == ns) wall += 1.0;
        if (j == 0 || j + 1 == ns) wall += 1.0;
        if (k == 0 || k + 1 == ns) wall += 1.0;
        s += 2.0 * wall * u.v[p] * v.v[p] * h;
      }
  return s;
}

inline double grad_norm_sq(const Field& u) { return dirichlet_form(u, u); }

inline Field apply_neg_laplacian(const Field& u) {
  const auto& d = *u.dom;
  Field out(u.dom);
  if (d.radial()) {
    const std::size_t n = d.n;
    // fluxes G_i = fc_i (u_i - u_{i-1}), ghost u_n = 0
    std::vector<double> G(n + 1, 0.0);
    for (std::size_t i = 1; i < n; ++i) G[i] = d.fc[i] * (u.v[i] - u.v[i - 1]);
    G[n] = d.fc[n] * (0.0 - u.v[n - 1]);
    for (std::size_t i = 0; i < n; ++i) out.v[i] = (G[i] - G[i + 1]) / d.w[i];
    return out;
  }
  const std::size_t ns = d.nside;
  const double ih2 = 1.0 / (d.hbox * d.hbox);
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < ns; ++j)
      for (std::size_t k = 0; k < ns; ++k) {
        const std::size_t p = d.box_index(i, j, k);
        const double c = u.v[p];
        double acc = 0.0;
        acc += (i + 1 < ns) ? (c - u.v[d.box_index(i + 1, j, k)]) : 2.0 * c;
        acc += (i > 0) ? (c - u.v[d.box_index(i - 1, j, k)]) : 2.0 * c;
        acc += (j + 1 < ns) ? (c - u.v[d.box_index(i, j + 1, k)]) : 2.0 * c;
        acc += (j > 0) ? (c - u.v[d.box_index(i, j - 1, k)]) : 2.0 * c;
        acc += (k + 1 < ns) ? (c - u.v[d.box_index(i, j, k + 1)]) : 2.0 * c;
        acc += (k > 0) ? (c - u.v[d.box_index(i, j, k - 1)]) : 2.0 * c;
        out.v[p] = acc * ih2;
      }
  return out;
}

// Tridiagonal bands of (-Laplacian + diag(V) - shift) on radial grids.
struct RadialBands {
  std::vector<double> lower, diag, upper;
};

inline RadialBands radial_operator_bands(const Domain& d, const std::vector<double>& V,
                                         double shift = 0.0) {
  if (!d.radial()) throw std::invalid_argument("radial_operator_bands: radial grids only");
  const std::size_t n = d.n;
  RadialBands bd;
  bd.lower.assign(n, 0.0);
  bd.diag.assign(n, 0.0);
  bd.upper.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double cl = d.fc[i];       // face to i-1 (0 at origin)
    const double cr = d.fc[i + 1];   // face to i+1 (outer ghost for i=n-1)
    bd.diag[i] = (cl + cr) / d.w[i] + (V.empty() ? 0.0 : V[i]) - shift;
    if (i > 0) bd.lower[i] = -cl / d.w[i];
    if (i + 1 < n) bd.upper[i] = -cr / d.w[i];
  }
  return bd;
}

// ---- derivatives ----------------------------------------------------------

namespace detail {
// derivative at x0 from three points (xm,um),(x0,u0),(xp,up)
inline double deriv3(double xm, double um, double x0, double u0, double xp, double up) {
  const double hm = x0 - xm, hp = xp - x0;
  return (-hp / (hm * (hm + hp))) * um + ((hp - hm) / (hm * hp)) * u0 +
         (hm / (hp * (hm + hp))) * up;
}
}  // namespace detail

// du/dr on radial grids (regularity u'(0)=0 via even mirror at the origin,
// Dirichlet ghost at R_max).
inline Field radial_derivative(const Field& u) {
  const auto& d = *u.dom;
  if (!d.radial()) throw std::invalid_argument("radial_derivative: radial grids only");
  const std::size_t n = d.n;
  Field out(u.dom);
  out.v[0] = detail::deriv3(-d.r[0], u.v[0], d.r[0], u.v[0], d.r[1], u.v[1]);
  for (std::size_t i = 1; i + 1 < n; ++i)
    out.v[i] = detail::deriv3(d.r[i - 1], u.v[i - 1], d.r[i], u.v[i], d.r[i + 1], u.v[i + 1]);
  out.v[n - 1] =
      detail::deriv3(d.r[n - 2], u.v[n - 2], d.r[n - 1], u.v[n - 1], d.R_max, 0.0);
  return out;
}

// x . grad(u) per node.
inline Field virial_moment(const Field& u) {
  const auto& d = *u.dom;
  if (d.radial()) {
    Field du = radial_derivative(u);
    for (std::size_t i = 0; i < d.n; ++i) du.v[i] *= d.r[i];
    return du;
  }
  const std::size_t ns = d.nside;
  const double h = d.hbox;
  Field out(u.dom);
  auto axis_term = [&](std::size_t p, std::size_t stride, std::size_t pos, double x) {
    double du;
    if (pos == 0)
      du = (-3.0 * u.v[p] + 4.0 * u.v[p + stride] - u.v[p + 2 * stride]) / (2.0 * h);
    else if (pos + 1 == ns)
      du = (3.0 * u.v[p] - 4.0 * u.v[p - stride] + u.v[p - 2 * stride]) / (2.0 * h);
    else
      du = (u.v[p + stride] - u.v[p - stride]) / (2.0 * h);
    return x * du;
  };
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < ns; ++j)
      for (std::size_t k = 0; k < ns; ++k) {
        const std::size_t p = d.box_index(i, j, k);
        out.v[p] = axis_term(p, ns * ns, i, d.box_coord(i)) +
                   axis_term(p, ns, j, d.box_coord(j)) +
                   axis_term(p, 1, k, d.box_coord(k));
      }
  return out;
}

// ---- interpolation and dilation -------------------------------------------

namespace detail {

// cubic Lagrange at fractional index p over a uniformly indexed sequence
inline double lagrange4(const std::vector<double>& v, double p) {
  const std::size_t n = v.size();
  long j = static_cast<long>(std::floor(p)) - 1;
  j = std::max<long>(0, std::min<long>(j, static_cast<long>(n) - 4));
  const double t = p - static_cast<double>(j);
  const double c0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  const double c1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  const double c2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  const double c3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return c0 * v[j] + c1 * v[j + 1] + c2 * v[j + 2] + c3 * v[j + 3];
}

// evaluate a radial field at radius rho; smooth even extension below the
// first node, linear taper to the Dirichlet zero at R_max
inline double eval_radial(const Field& u, double rho) {
  const auto& d = *u.dom;
  const std::size_t n = d.n;
  double p;
  if (d.kind == GridKind::RadialLog) {
    if (rho <= 0.0) {
      // even profile: u ~ a + b r^2 near the origin
      const double r0 = d.r[0], r1 = d.r[1];
      return u.v[0] + (u.v[1] - u.v[0]) * (0.0 - r0 * r0) / (r1 * r1 - r0 * r0);
    }
    p = std::log(rho / d.r[0]) / d.logq;
  } else {
    p = rho / (d.R_max / static_cast<double>(n)) - 0.5;
  }
  if (p < 0.0) {
    const double r0 = d.r[0], r1 = d.r[1];
    return u.v[0] + (u.v[1] - u.v[0]) * (rho * rho - r0 * r0) / (r1 * r1 - r0 * r0);
  }
  const double pmax = static_cast<double>(n) - 0.5;  // index of R_max
  if (p >= pmax) return 0.0;
  if (p > static_cast<double>(n - 1))
    return u.v[n - 1] * (pmax - p) / 0.5;
  return lagrange4(u.v, p);
}

}  // namespace detail

// Mass-preserving dilation h*u(x) = h^{N/2} u(hx). On log grids an integer
// power of the grid ratio is an exact index shift; otherwise cubic
// interpolation in log r (in r for uniform grids, trilinear on boxes).
inline Field dilate(const Field& u, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("dilate: h must be positive");
  const auto& d = *u.dom;
  Field out(u.dom);
  const double amp = std::pow(h, 0.5 * d.N);
  if (h == 1.0) {
    out.v = u.v;
    return out;
  }
  if (d.kind == GridKind::RadialLog) {
    const double delta = std::log(h) / d.logq;
    const double rdelta = std::round(delta);
    if (std::abs(delta - rdelta) < 1e-12) {
      const long k = static_cast<long>(rdelta);
      const long n = static_cast<long>(d.n);
      for (long i = 0; i < n; ++i) {
        const long j = i + k;
        if (j >= n)
          out.v[i] = 0.0;
        else if (j >= 0)
          out.v[i] = amp * u.v[j];
        else
          out.v[i] = amp * detail::eval_radial(u, h * d.r[i]);
      }
      return out;
    }
  }
  if (d.radial()) {
    for (std::size_t i = 0; i < d.n; ++i)
      out.v[i] = amp * detail::eval_radial(u, h * d.r[i]);
    return out;
  }
  // box: trilinear at h*x, zero outside
  const std::size_t ns = d.nside;
  auto sample1 = [&](double x) {
    return x / d.hbox + 0.5 * static_cast<double>(ns) - 0.5;  // fractional index
  };
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < ns; ++j)
      for (std::size_t k = 0; k < ns; ++k) {
        const double px = sample1(h * d.box_coord(i));
        const double py = sample1(h * d.box_coord(j));
        const double pz = sample1(h * d.box_coord(k));
        double val = 0.0;
        if (px >= 0 && py >= 0 && pz >= 0 && px <= ns - 1 && py <= ns - 1 && pz <= ns - 1) {
          const std::size_t ix = std::min<std::size_t>(static_cast<std::size_t>(px), ns - 2);
          const std::size_t iy = std::min<std::size_t>(static_cast<std::size_t>(py), ns - 2);
          const std::size_t iz = std::min<std::size_t>(static_cast<std::size_t>(pz), ns - 2);
          const double tx = px - ix, ty = py - iy, tz = pz - iz;
          for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb)
              for (int c = 0; c < 2; ++c) {
                const double wgt = (a ? tx : 1 - tx) * (bb ? ty : 1 - ty) * (c ? tz : 1 - tz);
                val += wgt * u.v[d.box_index(ix + a, iy + bb, iz + c)];
              }
        }
        out.v[d.box_index(i, j, k)] = amp * val;
      }
  return out;
}

// ---- small field helpers ---------------------------------------------------

template <class F>
Field field_from_radius(DomainPtr d, F&& fn) {
  Field out(d);
  for (std::size_t i = 0; i < d->n; ++i) out.v[i] = fn(d->absx[i]);
  return out;
}

inline Field normalized(const Field& u) {
  const double nrm = l2_norm(u);
  if (!(nrm > 0.0)) throw std::invalid_argument("normalized: field has zero mass");
  Field out = u;
  for (auto& x : out.v) x /= nrm;
  return out;
}

inline Field axpy(double a, const Field& x, const Field& y) {  // a*x + y
  require_same_domain(x, y);
  Field out = y;
  for (std::size_t i = 0; i < x.v.size(); ++i) out.v[i] += a * x.v[i];
  return out;
}

inline Field scaled(const Field& x, double a) {
  Field out = x;
  for (auto& t : out.v) t *= a;
  return out;
}

}  // namespace critnls
