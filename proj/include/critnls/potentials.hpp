#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "critnls/domain.hpp"
#include "critnls/sobolev.hpp"

namespace critnls {

inline double lp_norm(const Field& f, double p) {
  if (p == std::numeric_limits<double>::infinity()) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: need p >= 1");
  const auto& d = *f.dom;
  double s = 0.0;
  for (std::size_t i = 0; i < d.n; ++i) s += d.w[i] * std::pow(std::abs(f.v[i]), p);
  return std::pow(s, 1.0 / p);
}

inline double critical_exponent(int N) { return 2.0 * N / (N - 2.0); }

inline double critical_norm_pow(const Field& u) {  // int |u|^{2*}
  const auto& d = *u.dom;
  const double p = critical_exponent(d.N);
  double s = 0.0;
  for (std::size_t i = 0; i < d.n; ++i) s += d.w[i] * std::pow(std::abs(u.v[i]), p);
  return s;
}

// Power-law bound |V(x)| <= C |x|^{-beta} valid beyond the grid radius.
// C = 0 declares compact support inside the grid.
struct TailEnvelope {
  double C = 0.0;
  double beta = 0.0;
  double at(double r) const { return C <= 0.0 ? 0.0 : C * std::pow(r, -beta); }
};

// ---- builtin radial families ----------------------------------------------

using RadialEvaluator = std::function<double(double)>;

// depth eta > 0 gives the attractive well -eta on B_radius; edge > 0 smooths
// the drop over [radius, radius+edge] with a C^2 step.
inline RadialEvaluator well_potential(double eta, double radius, double edge = 0.0) {
  if (!(radius > 0.0) || edge < 0.0) throw std::invalid_argument("well_potential: bad shape");
  return [=](double r) {
    if (r <= radius) return -eta;
    if (edge > 0.0 && r < radius + edge) return -eta * (1.0 - smoothstep5((r - radius) / edge));
    return 0.0;
  };
}

inline RadialEvaluator lorentzian_potential(double amplitude, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("lorentzian_potential: bad scale");
  return [=](double r) { return amplitude / (1.0 + (r / scale) * (r / scale)); };
}

inline RadialEvaluator coulomb_cut_potential(double amplitude, double core) {
  if (!(core > 0.0)) throw std::invalid_argument("coulomb_cut_potential: bad core");
  return [=](double r) { return amplitude / std::max(r, core); };
}

inline RadialEvaluator table_potential(std::vector<double> radii, std::vector<double> values) {
  if (radii.size() != values.size() || radii.size() < 2)
    throw std::invalid_argument("table_potential: need >= 2 samples");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw std::invalid_argument("table_potential: radii must increase");
  return [radii = std::move(radii), values = std::move(values)](double r) {
    if (r <= radii.front()) return values.front();
    if (r >= radii.back()) return values.back();
    const auto it = std::upper_bound(radii.begin(), radii.end(), r);
    const std::size_t j = static_cast<std::size_t>(it - radii.begin());
    const double t = (r - radii[j - 1]) / (radii[j] - radii[j - 1]);
    return values[j - 1] + t * (values[j] - values[j - 1]);
  };
}

// ---- shell decomposition (constructive splitting into L^p + L^inf) --------

struct ShellPart {
  int sign = +1;            // which signed part of the field this describes
  int case_id = 1;          // 1: compact support, 2: shell construction
  std::vector<double> radii;       // region outer radii (case 2: R_0, R_1, ...)
  std::vector<double> thresholds;  // eta per region
  std::vector<double> sup_f2;      // sup of the bounded piece per region
  double achieved = 0.0;           // ||f1||_p^p for this part (incl. tail bound)
};

struct DecompositionCertificate {
  double delta = 0.0;   // target
  double p = 0.0;       // norm exponent of the small piece
  double r = 0.0;       // integrability exponent of the input
  double achieved = 0.0;
  bool pass = false;    // achieved <= 3 delta
  std::vector<ShellPart> parts;
};

namespace detail {

// one sign part f >= 0 with budget db; marks f1 membership in keep[]
inline ShellPart decompose_part(const Field& f, const TailEnvelope& tail, double r,
                                double db, double p, int sign, std::vector<char>& keep) {
  const auto& d = *f.dom;
  const std::size_t n = d.n;
  ShellPart part;
  part.sign = sign;

  // nodes ordered by radius (radial grids are already sorted)
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (!d.radial())
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return d.absx[a] < d.absx[b]; });

  double max_f = 0.0;
  for (double x : f.v) max_f = std::max(max_f, x);

  // minimal threshold whose strict super-level set stays under `budget`
  // in the p-norm, over nodes selected by `in_region`
  auto pick_threshold = [&](auto&& in_region, double budget) {
    std::vector<double> vals;
    for (std::size_t i = 0; i < n; ++i)
      if (in_region(i) && f.v[i] > 0.0) vals.push_back(f.v[i]);
    if (vals.empty()) return 0.0;
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    double eta = vals.back();  // empty super-level set, always feasible
    // p-norm mass per distinct value bucket
    std::vector<double> bucket(vals.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_region(i) || f.v[i] <= 0.0) continue;
      const auto it = std::lower_bound(vals.begin(), vals.end(), f.v[i]);
      bucket[static_cast<std::size_t>(it - vals.begin())] += d.w[i] * std::pow(f.v[i], p);
    }
    // descending scan: after including bucket k, the super-level set of
    // eta = vals[k-1] has mass sum(buckets k..end)
    double massp = 0.0;
    for (std::size_t k = vals.size(); k-- > 0;) {
      const double candidate_mass = massp + bucket[k];
      if (candidate_mass > budget) break;
      massp = candidate_mass;
      eta = (k == 0) ? 0.0 : vals[k - 1];
    }
    return eta;
  };

  auto mark_keep = [&](auto&& in_region, double eta) {
    double got = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (in_region(i) && f.v[i] > eta) {
        keep[i] = 1;
        got += d.w[i] * std::pow(f.v[i], p);
      }
    return got;
  };
  auto sup_small = [&](auto&& in_region, double eta) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (in_region(i) && f.v[i] <= eta) s = std::max(s, f.v[i]);
    return s;
  };

  if (tail.C <= 0.0) {
    // compact support inside the grid
    part.case_id = 1;
    double support = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (f.v[i] > 0.0) support = std::max(support, d.absx[i]);
    auto all = [](std::size_t) { return true; };
    const double eta = pick_threshold(all, 3.0 * db);
    part.achieved = mark_keep(all, eta);
    part.radii = {support};
    part.thresholds = {eta};
    part.sup_f2 = {sup_small(all, eta)};
    return part;
  }

  // case 2: shells capturing geometric fractions of the L^r tail mass
  part.case_id = 2;
  if (!(tail.beta * r > d.N))
    throw std::invalid_argument("decompose_shells: tail envelope not in L^r (need beta*r > N)");
  const double omega = d.sphere_area;
  auto tail_mass_beyond_grid = [&](double R) {
    // int_R^inf (C s^-beta)^r omega s^{N-1} ds
    return omega * std::pow(tail.C, r) * std::pow(std::max(R, 1e-300), d.N - tail.beta * r) /
           (tail.beta * r - d.N);
  };
  // suffix L^r masses along the radius ordering
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t i = order[k];
    suffix[k] = suffix[k + 1] + d.w[i] * std::pow(f.v[i], r);
  }
  const double analytic_total = tail_mass_beyond_grid(d.R_max);
  auto radius_for_budget = [&](double budget) {
    // smallest node radius R with tail mass beyond R <= budget
    if (budget >= analytic_total) {
      // binary search over the ordering
      std::size_t lo = 0, hi = n;  // answer in [lo, hi]
      while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (suffix[mid + 1] + analytic_total <= budget)
          hi = mid;
        else
          lo = mid + 1;
      }
      if (lo < n) return d.absx[order[lo]];
    }
    // radius beyond the grid, from the envelope alone
    return std::pow(omega * std::pow(tail.C, r) / ((tail.beta * r - d.N) * budget),
                    1.0 / (tail.beta * r - d.N));
  };

  // T(R_k) <= db/2^{k+1} makes the shell (R_{k-1}, R_k] carry at most
  // db/2^k of L^r mass
  const int max_shells = 64;
  std::vector<double> radii{radius_for_budget(0.5 * db)};
  for (int k = 1; k <= max_shells; ++k)
    radii.push_back(std::max(radii.back(), radius_for_budget(db * std::pow(0.5, k + 1))));

  std::vector<double> etas(radii.size());
  auto in_region = [&](std::size_t reg) {
    const double lo = (reg == 0) ? -1.0 : radii[reg - 1];
    const double hi = radii[reg];
    return [&, lo, hi](std::size_t i) { return d.absx[i] > lo && d.absx[i] <= hi; };
  };
  etas[0] = pick_threshold(in_region(0), db);
  for (std::size_t k = 1; k < radii.size(); ++k) {
    if (r > p)
      etas[k] = (k == 1) ? 1.0 : std::pow(double(k), -1.0 / (r - p));
    else
      etas[k] = std::pow(0.5, double(k));
  }

  part.achieved = 0.0;
  for (std::size_t reg = 0; reg < radii.size(); ++reg) {
    part.achieved += mark_keep(in_region(reg), etas[reg]);
    double sup = sup_small(in_region(reg), etas[reg]);
    const double inner = (reg == 0) ? d.R_max : std::max(radii[reg - 1], d.R_max);
    if (radii[reg] > d.R_max) sup = std::max(sup, std::min(etas[reg], tail.at(inner)));
    part.sup_f2.push_back(sup);
    // beyond the grid the envelope must sit under the threshold, else the
    // proof bound k*db/2^k is charged for the unseen super-level mass
    if (radii[reg] > d.R_max && tail.at(inner) > etas[reg])
      part.achieved += (reg == 0) ? db : double(reg) * db * std::pow(0.5, double(reg));
  }
  part.radii = radii;
  part.thresholds = etas;
  return part;
}

}  // namespace detail

// Splits f = f1 + f2 nodewise following the shell construction: f1 small in
// L^p (p defaults to N/2), f2 bounded with sup vanishing along the shells.
inline std::tuple<Field, Field, DecompositionCertificate> decompose_shells(
    const Field& f, const TailEnvelope& tail, double r, double delta, double p = 0.0) {
  const auto& d = *f.dom;
  if (p <= 0.0) p = 0.5 * d.N;
  if (!(delta > 0.0)) throw std::invalid_argument("decompose_shells: delta must be positive");
  if (!(r >= p)) throw std::invalid_argument("decompose_shells: need r >= p");

  bool has_pos = false, has_neg = false;
  for (double x : f.v) {
    has_pos |= (x > 0.0);
    has_neg |= (x < 0.0);
  }
  const bool both = has_pos && has_neg;
  const double db = both ? 0.5 * delta : delta;

  DecompositionCertificate cert;
  cert.delta = delta;
  cert.p = p;
  cert.r = r;

  std::vector<char> keep(d.n, 0);
  if (has_pos || !has_neg) {
    Field fp(f.dom);
    for (std::size_t i = 0; i < d.n; ++i) fp.v[i] = std::max(f.v[i], 0.0);
    cert.parts.push_back(detail::decompose_part(fp, tail, r, db, p, +1, keep));
  }
  if (has_neg) {
    Field fm(f.dom);
    for (std::size_t i = 0; i < d.n; ++i) fm.v[i] = std::max(-f.v[i], 0.0);
    cert.parts.push_back(detail::decompose_part(fm, tail, r, db, p, -1, keep));
  }

  Field f1(f.dom), f2(f.dom);
  for (std::size_t i = 0; i < d.n; ++i) {
    f1.v[i] = keep[i] ? f.v[i] : 0.0;
    f2.v[i] = f.v[i] - f1.v[i];
  }
  cert.achieved = 0.0;
  for (const auto& part : cert.parts) cert.achieved += part.achieved;
  cert.pass = cert.achieved <= 3.0 * delta * (1.0 + 1e-12);
  return {f1, f2, cert};
}

// ---- potential bundle -------------------------------------------------------

struct PotentialSpec {
  DomainPtr dom;
  RadialEvaluator eval;
  TailEnvelope tail;
  double local_exponent = std::numeric_limits<double>::infinity();  // L^r(B_2R) class
  double r1 = std::numeric_limits<double>::infinity();  // claimed global exponent of V
  double r2 = std::numeric_limits<double>::infinity();  // claimed global exponent of W

  Field V, W;
  bool decomposed = false;
  Field V1, V2, W1, W2;
  DecompositionCertificate cert;

  // Characteristic-set split of V; W pieces follow the same set so that
  // W_i = V_i |x| holds exactly nodewise.
  void decompose(double delta, double r_exp) {
    auto [v1, v2, c] = decompose_shells(V, tail, r_exp, delta, 0.5 * dom->N);
    V1 = std::move(v1);
    V2 = std::move(v2);
    cert = std::move(c);
    W1 = Field(dom);
    W2 = Field(dom);
    for (std::size_t i = 0; i < dom->n; ++i) {
      W1.v[i] = V1.v[i] * dom->absx[i];
      W2.v[i] = W.v[i] - W1.v[i];
    }
    decomposed = true;
  }
};

inline std::pair<Field, Field> sample_potential(const RadialEvaluator& eval, DomainPtr d) {
  Field V(d), W(d);
  for (std::size_t i = 0; i < d->n; ++i) {
    const double val = eval(d->absx[i]);
    if (!std::isfinite(val))
      throw std::runtime_error("sample_potential: evaluator returned a non-finite value");
    V.v[i] = val;
    W.v[i] = val * d->absx[i];
  }
  return {std::move(V), std::move(W)};
}

inline PotentialSpec make_potential(DomainPtr d, RadialEvaluator eval, TailEnvelope tail = {},
                                    double local_exponent = std::numeric_limits<double>::infinity(),
                                    double r1 = std::numeric_limits<double>::infinity(),
                                    double r2 = std::numeric_limits<double>::infinity()) {
  PotentialSpec spec;
  spec.dom = std::move(d);
  spec.eval = std::move(eval);
  spec.tail = tail;
  spec.local_exponent = local_exponent;
  spec.r1 = r1;
  spec.r2 = r2;
  auto [V, W] = sample_potential(spec.eval, spec.dom);
  spec.V = std::move(V);
  spec.W = std::move(W);
  return spec;
}

// ---- inequality audit -------------------------------------------------------

struct InequalityAudit {
  // pairs: (V1 mass term, V1 virial term, V2 mass term, V2 virial term)
  std::array<double, 4> lhs{}, rhs{};
  std::array<bool, 4> violated{};
  bool any_violation = false;
};

inline InequalityAudit inequality_audit(const Field& u, const PotentialSpec& pot,
                                        double S = 0.0) {
  if (!pot.decomposed) throw std::invalid_argument("inequality_audit: decomposition missing");
  require_same_domain(u, pot.V);
  const auto& d = *u.dom;
  if (S <= 0.0) S = sobolev_constant(d.N);

  const double K = grad_norm_sq(u);
  const double m2 = mass(u);
  Field xdu = virial_moment(u);

  double l1 = 0, l2 = 0, l3 = 0, l4 = 0;
  for (std::size_t i = 0; i < d.n; ++i) {
    l1 += d.w[i] * pot.V1.v[i] * u.v[i] * u.v[i];
    l2 += d.w[i] * pot.V1.v[i] * u.v[i] * xdu.v[i];
    l3 += d.w[i] * pot.V2.v[i] * u.v[i] * u.v[i];
    l4 += d.w[i] * pot.V2.v[i] * u.v[i] * xdu.v[i];
  }

  InequalityAudit a;
  a.lhs = {std::abs(l1), std::abs(l2), std::abs(l3), std::abs(l4)};
  a.rhs = {lp_norm(pot.V1, 0.5 * d.N) / S * K,
           lp_norm(pot.W1, d.N) / std::sqrt(S) * K,
           lp_norm(pot.V2, std::numeric_limits<double>::infinity()) * m2,
           lp_norm(pot.W2, std::numeric_limits<double>::infinity()) * std::sqrt(m2) * std::sqrt(K)};
  for (int i = 0; i < 4; ++i) {
    a.violated[i] = a.lhs[i] > a.rhs[i] + 1e-8 * (1.0 + a.rhs[i]);
    a.any_violation |= a.violated[i];
  }
  return a;
}

// ---- scaling continuity -----------------------------------------------------

struct ScalingCurve {
  std::vector<double> s;
  std::vector<double> value;       // || s^alpha V(./s) - V ||_p
  bool monotone_to_zero = false;   // values shrink as s approaches 1
};

inline ScalingCurve scaling_continuity(const Field& V, double alpha, double p,
                                       const std::vector<double>& s_list) {
  if (!(p >= 1.0) || p == std::numeric_limits<double>::infinity())
    throw std::invalid_argument("scaling_continuity: need finite p >= 1");
  const auto& d = *V.dom;
  if (!d.radial())
    throw std::invalid_argument("scaling_continuity: radial grids only");
  ScalingCurve out;
  out.s = s_list;
  for (double s : s_list) {
    if (!(s > 0.0)) throw std::invalid_argument("scaling_continuity: s must be positive");
    if (s == 1.0) {
      out.value.push_back(0.0);
      continue;
    }
    const double amp = std::pow(s, alpha);
    double acc = 0.0;
    for (std::size_t i = 0; i < d.n; ++i) {
      const double shifted = detail::eval_radial(V, d.absx[i] / s);
      acc += d.w[i] * std::pow(std::abs(amp * shifted - V.v[i]), p);
    }
    out.value.push_back(std::pow(acc, 1.0 / p));
  }
  // check decay toward s = 1: sort by |s-1| and require nonincreasing values
  std::vector<std::size_t> idx(s_list.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(s_list[a] - 1.0) > std::abs(s_list[b] - 1.0);
  });
  out.monotone_to_zero = true;
  for (std::size_t k = 1; k < idx.size(); ++k)
    if (out.value[idx[k]] > out.value[idx[k - 1]] * (1.0 + 1e-9)) out.monotone_to_zero = false;
  return out;
}

// Dimension-dependent local integrability bar for the saddle machinery:
// L^r(B_2R) with r > 2, 4, 10 for N = 3, 4, 5 (or plain boundedness).
inline bool local_integrability_gate(const PotentialSpec& pot, int N) {
  if (pot.local_exponent == std::numeric_limits<double>::infinity()) return true;
  const double bar = (N == 3) ? 2.0 : (N == 4) ? 4.0 : 10.0;
  return pot.local_exponent > bar;
}

}  // namespace critnls
