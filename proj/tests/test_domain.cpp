#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "critnls/domain.hpp"

using namespace critnls;

namespace {

Field unit_gaussian(DomainPtr d) {
  // pi^{-N/4} exp(-|x|^2/2), unit L^2 mass on R^N
  const double amp = std::pow(pi, -0.25 * d->N);
  return field_from_radius(d, [&](double r) { return amp * std::exp(-0.5 * r * r); });
}

}  // namespace

TEST_CASE("constant integrates to the truncated-ball volume") {
  for (int N : {3, 4, 5}) {
    auto d = build_domain(N, GridKind::RadialUniform, 10.0, 1000);
    Field one = field_from_radius(d, [](double) { return 1.0; });
    REQUIRE(integrate(one) == Catch::Approx(ball_volume(N, 10.0)).epsilon(1e-6));
    auto dl = build_domain(N, GridKind::RadialLog, 50.0, 2048);
    Field onel = field_from_radius(dl, [](double) { return 1.0; });
    REQUIRE(integrate(onel) == Catch::Approx(ball_volume(N, 50.0)).epsilon(1e-6));
  }
}

TEST_CASE("box domain volume and weights") {
  auto d = build_domain(3, GridKind::BoxUniform, 8.0, 24);
  REQUIRE(d->n == 24u * 24u * 24u);
  Field one(d);
  for (auto& x : one.v) x = 1.0;
  REQUIRE(integrate(one) == Catch::Approx(16.0 * 16.0 * 16.0).epsilon(1e-12));
}

TEST_CASE("log grid has constant node ratio and positive weights") {
  auto d = build_domain(4, GridKind::RadialLog, 50.0, 2048);
  const double q = d->r[1] / d->r[0];
  REQUIRE(q > 1.0);
  for (std::size_t i = 1; i + 1 < d->n; ++i)
    REQUIRE(d->r[i + 1] / d->r[i] == Catch::Approx(q).epsilon(1e-12));
  for (double w : d->w) REQUIRE(w > 0.0);
}

TEST_CASE("gaussian mass and ball indicator") {
  auto d = build_domain(3, GridKind::RadialLog, 16.0, 8192);
  Field g = unit_gaussian(d);
  Field g2 = g;
  for (auto& x : g2.v) x *= x;
  REQUIRE(integrate(g2) == Catch::Approx(1.0).epsilon(1e-6));

  Field chi = field_from_radius(d, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
  REQUIRE(integrate(chi) == Catch::Approx(4.0 * pi / 3.0).epsilon(2e-3));

  auto du = build_domain(3, GridKind::RadialUniform, 16.0, 8192);
  Field gu = unit_gaussian(du);
  Field gu2 = gu;
  for (auto& x : gu2.v) x *= x;
  REQUIRE(integrate(gu2) == Catch::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("integrate is linear and monotone") {
  auto d = build_domain(3, GridKind::RadialLog, 10.0, 256);
  Field f = field_from_radius(d, [](double r) { return std::sin(r); });
  Field g = field_from_radius(d, [](double r) { return std::exp(-r); });
  const double a = 1.7, b = -0.3;
  Field comb = axpy(a, f, scaled(g, b));
  REQUIRE(integrate(comb) ==
          Catch::Approx(a * integrate(f) + b * integrate(g)).margin(1e-12));
  Field fplus = field_from_radius(d, [](double r) { return std::sin(r) + 0.5; });
  REQUIRE(integrate(fplus) >= integrate(f));
}

TEST_CASE("gradient energy of the unit gaussian is N/2") {
  for (int N : {3, 4, 5}) {
    auto d = build_domain(N, GridKind::RadialLog, 16.0, 4096);
    Field g = unit_gaussian(d);
    REQUIRE(grad_norm_sq(g) == Catch::Approx(0.5 * N).epsilon(1e-4));
  }
}

TEST_CASE("gradient energy vanishes only at zero") {
  auto d = build_domain(3, GridKind::RadialLog, 10.0, 128);
  Field z(d);
  REQUIRE(grad_norm_sq(z) == 0.0);
  Field c = field_from_radius(d, [](double) { return 1.0; });
  REQUIRE(grad_norm_sq(c) > 0.0);  // Dirichlet truncation sees constants
}

TEST_CASE("neg-laplacian is adjoint to the Dirichlet form") {
  auto d = build_domain(3, GridKind::RadialLog, 12.0, 512);
  Field u = field_from_radius(d, [](double r) { return std::exp(-r) * (1 + r); });
  Field v = field_from_radius(d, [](double r) { return std::exp(-0.5 * r * r); });
  const double lhs = inner(apply_neg_laplacian(u), v);
  const double rhs = dirichlet_form(u, v);
  REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-12));

  auto db = build_domain(3, GridKind::BoxUniform, 6.0, 16);
  Field ub(db), vb(db);
  for (std::size_t i = 0; i < db->n; ++i) {
    ub.v[i] = std::exp(-db->absx[i]);
    vb.v[i] = std::cos(db->absx[i]);
  }
  REQUIRE(inner(apply_neg_laplacian(ub), vb) ==
          Catch::Approx(dirichlet_form(ub, vb)).epsilon(1e-12));
}

TEST_CASE("dilation: identity, mass, group law, energy scaling") {
  auto d = build_domain(3, GridKind::RadialLog, 20.0, 2048);
  Field g = normalized(unit_gaussian(d));

  Field id = dilate(g, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(id.v[i] == g.v[i]);

  const double q = d->q;
  Field up = dilate(g, q * q * q);  // exact index shift
  REQUIRE(l2_norm(up) == Catch::Approx(1.0).margin(1e-8));

  // group law on exact shifts
  Field ab = dilate(dilate(g, q * q), std::pow(q, 5.0));
  Field once = dilate(g, std::pow(q, 7.0));
  for (std::size_t i = 200; i + 200 < g.size(); ++i)
    REQUIRE(ab.v[i] == Catch::Approx(once.v[i]).margin(1e-13));

  // interpolated dilation stays close to mass preserving
  Field arb = dilate(g, 1.37);
  REQUIRE(l2_norm(arb) == Catch::Approx(1.0).margin(1e-6));

  // kinetic term scales as h^2, critical term as h^{2*}
  const double h = std::pow(q, 40.0);
  Field gh = dilate(g, h);
  REQUIRE(grad_norm_sq(gh) == Catch::Approx(h * h * grad_norm_sq(g)).epsilon(1e-6));
  auto p_norm = [&](const Field& f, double p) {
    Field t = f;
    for (auto& x : t.v) x = std::pow(std::abs(x), p);
    return integrate(t);
  };
  const double crit = 2.0 * 3 / (3 - 2.0);
  REQUIRE(p_norm(gh, crit) == Catch::Approx(std::pow(h, crit) * p_norm(g, crit)).epsilon(1e-6));
}

TEST_CASE("gradient energy converges at second order") {
  std::vector<double> ns{256, 512, 1024, 2048};
  std::vector<double> errs;
  auto bump = [](double r) {
    const double t = r / 5.0;
    return t < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
  };
  auto dref = build_domain(3, GridKind::RadialLog, 12.0, 16384);
  const double ref = grad_norm_sq(field_from_radius(dref, bump));
  for (double n : ns) {
    auto d = build_domain(3, GridKind::RadialLog, 12.0, static_cast<std::size_t>(n));
    errs.push_back(std::abs(grad_norm_sq(field_from_radius(d, bump)) - ref));
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    lx.push_back(std::log(ns[i]));
    ly.push_back(std::log(errs[i]));
  }
  const double order = -fit_line(lx, ly).slope;
  REQUIRE(order > 1.7);
  REQUIRE(order < 2.6);
}

TEST_CASE("build_domain rejects bad arguments") {
  REQUIRE_THROWS_AS(build_domain(6, GridKind::RadialLog, 10.0, 128), std::invalid_argument);
  REQUIRE_THROWS_AS(build_domain(4, GridKind::BoxUniform, 10.0, 32), std::invalid_argument);
  REQUIRE_THROWS_AS(build_domain(3, GridKind::RadialLog, -1.0, 128), std::invalid_argument);
  REQUIRE_THROWS_AS(build_domain(3, GridKind::RadialLog, 10.0, 8), std::invalid_argument);
  auto d = build_domain(3, GridKind::RadialLog, 10.0, 128);
  Field u(d);
  REQUIRE_THROWS_AS(dilate(u, -2.0), std::invalid_argument);
  auto d2 = build_domain(3, GridKind::RadialLog, 10.0, 129);
  Field v(d2);
  REQUIRE_THROWS_AS(inner(u, v), std::invalid_argument);
}
