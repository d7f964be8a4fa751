#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "complex_linalg.hpp"
#include "control.hpp"
#include "errors.hpp"
#include "nip.hpp"
#include "perturbed_map.hpp"
#include "rng.hpp"

namespace nipstab {

namespace detail {

inline void require_unit(cscalar mu) {
  if (std::abs(std::abs(mu) - 1.0) > 1e-12)
    throw unit_scalar_error("defect: mu must lie on the unit circle");
}

} // namespace detail

/// ||f(mu x + mu y) - mu f(x) - mu f(y)|| in the codomain norm.
template <class F>
double defect_cauchy(F&& f, cscalar mu, const cvector& x, const cvector& y) {
  detail::require_unit(mu);
  cvector lhs = f(mu * (x + y));
  lhs -= mu * f(x);
  lhs -= mu * f(y);
  return lhs.norm();
}

/// ||2 f((mu x + mu y)/2) - mu f(x) - mu f(y)||.
template <class F>
double defect_jensen(F&& f, cscalar mu, const cvector& x, const cvector& y) {
  detail::require_unit(mu);
  cvector lhs = cscalar(2.0) * f((mu * 0.5) * (x + y));
  lhs -= mu * f(x);
  lhs -= mu * f(y);
  return lhs.norm();
}

/// |<f(x), f(y)> - <x, y>|.
template <class F>
double defect_orthogonality(F&& f, const cvector& x, const cvector& y) {
  return std::abs(inner(f(x), f(y)) - inner(x, y));
}

/// |<f(x0), f(x1) | f(x2), ...>_Y - <x0, x1 | x2, ...>_X| for a tuple of
/// n+1 domain vectors.
template <class F>
double defect_n_orthogonality(F&& f, std::span<const cvector> xs,
                              const n_inner_form& form_x,
                              const n_inner_form& form_y) {
  if (xs.size() != static_cast<std::size_t>(form_x.n) + 1)
    throw arity_error("defect_n_orthogonality: need n+1 vectors");
  if (form_x.n != form_y.n)
    throw arity_error("defect_n_orthogonality: mismatched form arities");
  std::vector<cvector> images;
  images.reserve(xs.size());
  for (const auto& v : xs) images.push_back(f(v));
  std::span<const cvector> trail_x = xs.subspan(2);
  std::span<const cvector> trail_y(images.data() + 2, images.size() - 2);
  return std::abs(gram_n_inner(form_y, images[0], images[1], trail_y) -
                  gram_n_inner(form_x, xs[0], xs[1], trail_x));
}

namespace detail {

/// phi(a, b) for the power control, from the argument norms alone.
inline double phi_pair(double theta, double p, double na, double nb) {
  return theta * (pow_norm(na, p) + pow_norm(nb, p));
}

/// One-step telescoping gap bound at level l:
///   doubling:   ||U_{l+1} - U_l|| <= 2^-(l+1) phi(2^l x, 2^l x)
///   tripling:   <= 3^-(l+1) (phi(z, -z) + phi(-z, 3z)),  z = 3^l x
///   shrinking:  <= 3^l (phi(z, -z) + phi(-z, 3z)),       z = x / 3^(l+1)
inline double gap_bound(const scheme& s, double theta, double p, double norm_x,
                        int l) {
  switch (s.id) {
    case scheme_id::doubling: {
      double nl = std::ldexp(norm_x, l); // 2^l * norm_x
      return phi_pair(theta, p, nl, nl) / std::ldexp(1.0, l + 1);
    }
    case scheme_id::jensen_tripling: {
      double nl = norm_x * std::pow(3.0, l);
      double b = phi_pair(theta, p, nl, nl) + phi_pair(theta, p, nl, 3.0 * nl);
      return b / std::pow(3.0, l + 1);
    }
    case scheme_id::jensen_shrinking: {
      double nz = norm_x / std::pow(3.0, l + 1);
      double b = phi_pair(theta, p, nz, nz) + phi_pair(theta, p, nz, 3.0 * nz);
      return b * std::pow(3.0, l);
    }
  }
  throw config_error("gap_bound: unreachable");
}

} // namespace detail

/// U_l(x) for a single level: b^-l f(b^l x) for ascending schemes,
/// 3^l f(x / 3^l) for the shrinking scheme.
inline cvector scheme_iterate(const perturbed_map& f, const scheme& s,
                              const cvector& x, int l) {
  double scale = s.ascending ? std::pow(static_cast<double>(s.base), l)
                             : std::pow(3.0, -l);
  if (x.norm() * scale > 1e150)
    throw scale_overflow_error("scheme_iterate: scaled argument overflows");
  cvector y = f(cscalar(scale) * x);
  return cscalar(1.0 / scale) * y;
}

/// Final approximant U_{l_max}(x) without recording the iterate history.
inline cvector approximant(const perturbed_map& f, const scheme& s,
                           const cvector& x, int l_max) {
  return scheme_iterate(f, s, x, l_max);
}

struct approximation_run {
  scheme_id scheme_used;
  cvector x;
  std::vector<cvector> iterates;   // U_l(x), l = 0..l_max
  cvector approximant;             // U_{l_max}(x)
  double defect_observed = 0.0;    // ||f(x) - approximant||
  double defect_bound_theoretical = 0.0;
  double tail_bound = 0.0;         // analytic remainder from l_max on
  std::vector<double> gaps;        // ||U_{l+1} - U_l||
  std::vector<double> gap_bounds;  // telescoping per-step bounds
  bool gap_law_ok = false;
  bool pass = false;

  approximation_run(scheme_id id, cvector point)
      : scheme_used(id), x(std::move(point)), approximant(x.dim()) {}
};

/// Run the scheme's limit construction to level l_max, recording iterates,
/// per-step gaps against the telescoping law, the closed-form stability
/// bound, and the analytic convergence tail.
inline approximation_run direct_method(const perturbed_map& f, const scheme& s,
                                       const cvector& x, int l_max) {
  if (l_max < 1) throw config_error("direct_method: l_max must be >= 1");
  const double theta = f.theta();
  const double p = f.p();

  approximation_run run(s.id, x);
  for (int l = 0; l <= l_max; ++l)
    run.iterates.push_back(scheme_iterate(f, s, x, l));
  run.approximant = run.iterates.back();

  run.gap_law_ok = true;
  for (int l = 0; l < l_max; ++l) {
    double gap = (run.iterates[l + 1] - run.iterates[l]).norm();
    double bound = detail::gap_bound(s, theta, p, x.norm(), l);
    run.gaps.push_back(gap);
    run.gap_bounds.push_back(bound);
    if (gap > bound + 1e-12) run.gap_law_ok = false;
  }

  control_function cf = f.control(2);
  switch (s.id) {
    case scheme_id::doubling: {
      auto pt = phi_tilde(cf, s, std::vector<cvector>{x, x});
      run.defect_bound_theoretical = 0.5 * (pt.value + pt.tail);
      break;
    }
    case scheme_id::jensen_tripling:
      run.defect_bound_theoretical = jun_lee_bound(cf, x);
      break;
    case scheme_id::jensen_shrinking: {
      cvector x3 = cscalar(1.0 / 3.0) * x;
      auto a = phi_tilde(cf, s, std::vector<cvector>{x3, -x3});
      auto b = phi_tilde(cf, s, std::vector<cvector>{-x3, x});
      run.defect_bound_theoretical = a.value + a.tail + b.value + b.tail;
      break;
    }
  }

  run.tail_bound = analytic_tail_bound(s, theta, p, x.norm(), l_max);
  run.defect_observed = (f(x) - run.approximant).norm();
  run.pass = run.gap_law_ok &&
             run.defect_observed <=
                 run.defect_bound_theoretical + run.tail_bound + 1e-9;
  return run;
}

struct mode_check_report {
  int samples = 0;
  double max_excess = 0.0; // worst defect overshoot past phi, relative
  bool pass = false;
};

/// Re-check on seeded (mu, x, y) triples that the perturbation really
/// respects its mode's defect bound.
inline mode_check_report verify_mode(const perturbed_map& f, int sample_count,
                                     std::uint64_t seed) {
  mode_check_report rep;
  rep.samples = sample_count;
  const auto dim = f.domain_dim();
  for (int i = 0; i < sample_count; ++i) {
    rng r = rng::for_sample(seed, 21, static_cast<std::uint64_t>(i));
    cscalar mu = r.unit_scalar();
    cvector x = random_vector_with_norm(r, dim, 0.1, 3.0);
    cvector y = random_vector_with_norm(r, dim, 0.1, 3.0);
    double phi = detail::phi_pair(f.theta(), f.p(), x.norm(), y.norm());
    double d = f.mode() == perturbation_mode::cauchy_respecting
                   ? defect_cauchy(f, mu, x, y)
                   : defect_jensen(f, mu, x, y);
    // Normalize by the argument scale when phi itself is tiny (theta = 0),
    // so fp noise in an exactly linear map does not register as an excess.
    double excess = (d - phi) / std::max(phi, x.norm() + y.norm());
    rep.max_excess = std::max(rep.max_excess, excess);
  }
  rep.pass = rep.max_excess <= 1e-12;
  return rep;
}

struct linearity_report {
  int samples = 0;
  double max_additivity_violation = 0.0;
  double max_homogeneity_violation = 0.0;
  double max_uniqueness_gap = 0.0;
  double uniqueness_tail_bound = 0.0; // worst-case analytic tail at l_max
  bool uniqueness_ok = false;
  double tol = 0.0;
  bool pass = false;
};

/// Certify that the approximant behaves like a C-linear map: additivity,
/// homogeneity over 64 roots of unity plus 64 seeded unit scalars (scaled
/// by |alpha| <= 10), and stability of the approximant between l_max and
/// l_max + 2 within the analytic tail (uniqueness surrogate).
inline linearity_report certify_linearity(const perturbed_map& f,
                                          const scheme& s, int l_max,
                                          int sample_count, std::uint64_t seed,
                                          double tol) {
  linearity_report rep;
  rep.samples = sample_count;
  rep.tol = tol;
  rep.uniqueness_ok = true;
  const auto dim = f.domain_dim();

  std::vector<cscalar> mus;
  for (int k = 0; k < 64; ++k) {
    double t = 2.0 * 3.14159265358979323846 * k / 64.0;
    mus.emplace_back(std::cos(t), std::sin(t));
  }
  {
    rng r = rng::for_sample(seed, 22, 0);
    for (int k = 0; k < 64; ++k) mus.push_back(r.unit_scalar());
  }

  for (int i = 0; i < sample_count; ++i) {
    rng r = rng::for_sample(seed, 23, static_cast<std::uint64_t>(i));
    cvector x = random_vector_with_norm(r, dim, 0.25, 2.0);
    cvector y = random_vector_with_norm(r, dim, 0.25, 2.0);
    cvector ux = approximant(f, s, x, l_max);
    cvector uy = approximant(f, s, y, l_max);
    cvector uxy = approximant(f, s, x + y, l_max);
    double add = (uxy - ux - uy).norm() / (x.norm() + y.norm());
    rep.max_additivity_violation = std::max(rep.max_additivity_violation, add);

    for (std::size_t m = 0; m < mus.size(); ++m) {
      // Roots of unity probe pure mu-homogeneity; the random half carries
      // an amplitude so alpha = |alpha| mu covers the disc |alpha| <= 10.
      double amp = m < 64 ? 1.0 : r.uniform(0.1, 10.0);
      cscalar alpha = amp * mus[m];
      cvector ua = approximant(f, s, alpha * x, l_max);
      double hom = (ua - alpha * ux).norm() / (std::abs(alpha) * x.norm());
      rep.max_homogeneity_violation = std::max(rep.max_homogeneity_violation, hom);
    }

    cvector u2 = approximant(f, s, x, l_max + 2);
    double gap = (u2 - ux).norm();
    double tail = analytic_tail_bound(s, f.theta(), f.p(), x.norm(), l_max);
    rep.max_uniqueness_gap = std::max(rep.max_uniqueness_gap, gap);
    rep.uniqueness_tail_bound = std::max(rep.uniqueness_tail_bound, tail);
    if (gap > tail + 1e-12) rep.uniqueness_ok = false;
  }

  rep.pass = rep.max_additivity_violation <= tol &&
             rep.max_homogeneity_violation <= tol && rep.uniqueness_ok;
  return rep;
}

struct preservation_report {
  int samples = 0;
  double max_defect = 0.0;
  double max_allowed = 0.0; // largest per-sample analytic vanishing bound
  double slack = 0.0;
  bool pass = false;
};

namespace detail {

/// Analytic vanishing bound on the approximant's preservation defect at
/// level l: (1/b^l) phi(b^l args) ascending, b^(2nl)-scaled shrinking.
inline double preservation_allowed(const scheme& s, double theta, double p,
                                   std::span<const double> norms, int l,
                                   int n) {
  double sum = 0.0;
  if (s.ascending) {
    double scale = std::pow(static_cast<double>(s.base), l);
    for (double nm : norms) sum += pow_norm(nm * scale, p);
    return theta * sum / scale;
  }
  double scale = std::pow(3.0, l);
  for (double nm : norms) sum += pow_norm(nm / scale, p);
  return theta * sum * std::pow(3.0, 2.0 * n * l);
}

} // namespace detail

/// Preservation of the ordinary inner product by U_{l_max}.
inline preservation_report certify_preservation(const perturbed_map& f,
                                                const scheme& s, int l_max,
                                                int sample_count,
                                                std::uint64_t seed,
                                                double slack = 1e-9) {
  preservation_report rep;
  rep.samples = sample_count;
  rep.slack = slack;
  rep.pass = true;
  const auto dim = f.domain_dim();
  auto u = [&](const cvector& v) { return approximant(f, s, v, l_max); };
  for (int i = 0; i < sample_count; ++i) {
    rng r = rng::for_sample(seed, 24, static_cast<std::uint64_t>(i));
    cvector x = random_vector_with_norm(r, dim, 0.25, 2.0);
    cvector y = random_vector_with_norm(r, dim, 0.25, 2.0);
    double d = defect_orthogonality(u, x, y);
    double norms[] = {x.norm(), y.norm()};
    double allowed =
        detail::preservation_allowed(s, f.theta(), f.p(), norms, l_max, 1);
    rep.max_defect = std::max(rep.max_defect, d);
    rep.max_allowed = std::max(rep.max_allowed, allowed);
    if (d > allowed + slack) rep.pass = false;
  }
  return rep;
}

/// Preservation of Gram n-inner products by U_{l_max}; form_x lives on the
/// domain, form_y on the codomain.
inline preservation_report certify_preservation(
    const perturbed_map& f, const scheme& s, const n_inner_form& form_x,
    const n_inner_form& form_y, int l_max, int sample_count,
    std::uint64_t seed, double slack = 1e-9) {
  if (form_x.space_dim != static_cast<int>(f.domain_dim()) ||
      form_y.space_dim != static_cast<int>(f.codomain_dim()))
    throw dimension_error("certify_preservation: form dimensions mismatch");
  preservation_report rep;
  rep.samples = sample_count;
  rep.slack = slack;
  rep.pass = true;
  const int n = form_x.n;
  auto u = [&](const cvector& v) { return approximant(f, s, v, l_max); };
  for (int i = 0; i < sample_count; ++i) {
    rng r = rng::for_sample(seed, 25, static_cast<std::uint64_t>(i));
    std::vector<cvector> xs;
    std::vector<double> norms;
    for (int j = 0; j <= n; ++j) {
      xs.push_back(random_vector_with_norm(r, f.domain_dim(), 0.25, 2.0));
      norms.push_back(xs.back().norm());
    }
    double d = defect_n_orthogonality(u, xs, form_x, form_y);
    double allowed =
        detail::preservation_allowed(s, f.theta(), f.p(), norms, l_max, n);
    rep.max_defect = std::max(rep.max_defect, d);
    rep.max_allowed = std::max(rep.max_allowed, allowed);
    if (d > allowed + slack) rep.pass = false;
  }
  return rep;
}

} // namespace nipstab
