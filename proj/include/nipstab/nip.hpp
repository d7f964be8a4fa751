#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "complex_linalg.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace nipstab {

/// An (n+1)-ary form realized over a base inner product. The base is a
/// plain function so deliberately corrupted forms can be injected in
/// negative tests; `gram` builds the standard one.
struct n_inner_form {
  int n;
  int space_dim;
  std::function<cscalar(const cvector&, const cvector&)> base;

  static n_inner_form gram(int n, int space_dim) {
    if (n < 2) throw config_error("n_inner_form: n must be >= 2");
    if (space_dim < n)
      throw config_error("n_inner_form: space_dim must be >= n");
    return {n, space_dim, [](const cvector& u, const cvector& v) { return inner(u, v); }};
  }
};

/// <x, y | x_2, ..., x_n> as the determinant of the n x n matrix whose
/// first row is (<x,y>, <x,x_2>, ..., <x,x_n>) and whose row i >= 2 is
/// (<x_i,y>, <x_i,x_2>, ..., <x_i,x_n>).
inline cscalar gram_n_inner(const n_inner_form& form, const cvector& x,
                            const cvector& y,
                            std::span<const cvector> trailing) {
  const std::size_t n = static_cast<std::size_t>(form.n);
  if (trailing.size() != n - 1)
    throw arity_error("gram_n_inner: expected n-1 trailing vectors");
  const auto d = static_cast<std::size_t>(form.space_dim);
  if (x.dim() != d || y.dim() != d)
    throw dimension_error("gram_n_inner: dimension mismatch");
  for (const auto& t : trailing)
    if (t.dim() != d) throw dimension_error("gram_n_inner: dimension mismatch");

  cmatrix m(n, n);
  m(0, 0) = form.base(x, y);
  for (std::size_t j = 1; j < n; ++j) m(0, j) = form.base(x, trailing[j - 1]);
  for (std::size_t i = 1; i < n; ++i) {
    m(i, 0) = form.base(trailing[i - 1], y);
    for (std::size_t j = 1; j < n; ++j)
      m(i, j) = form.base(trailing[i - 1], trailing[j - 1]);
  }
  return det(m);
}

inline cscalar gram_n_inner(const n_inner_form& form, const cvector& x,
                            const cvector& y,
                            const std::vector<cvector>& trailing) {
  return gram_n_inner(form, x, y, std::span<const cvector>(trailing));
}

/// sqrt of the (real) self-value <x, x | trailing>. The value is required
/// to be essentially real and nonnegative; anything else signals a broken
/// base inner product.
inline double n_norm(const n_inner_form& form, const cvector& x,
                     std::span<const cvector> trailing) {
  cscalar g = gram_n_inner(form, x, x, trailing);
  if (std::abs(g.imag()) > 1e-10)
    throw axiom_violation_error("n_norm: self-value has nonreal part");
  if (g.real() < -1e-10)
    throw axiom_violation_error("n_norm: self-value is negative");
  return std::sqrt(std::max(g.real(), 0.0));
}

inline double n_norm(const n_inner_form& form, const cvector& x,
                     const std::vector<cvector>& trailing) {
  return n_norm(form, x, std::span<const cvector>(trailing));
}

struct axiom_check {
  std::string axiom_id;
  int samples = 0;
  double max_violation = 0.0;
  double tol = 0.0;

  bool pass() const { return max_violation <= tol; }
};

struct axiom_report {
  std::vector<axiom_check> checks;
  // Pivot-ratio condition estimate of the anchor Gram matrix; 1 when not
  // applicable (plain axiom runs).
  double condition_estimate = 1.0;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const axiom_check& c) { return c.pass(); });
  }

  double max_violation() const {
    double m = 0.0;
    for (const auto& c : checks) m = std::max(m, c.max_violation);
    return m;
  }

  const axiom_check* find(std::string_view id) const {
    for (const auto& c : checks)
      if (c.axiom_id == id) return &c;
    return nullptr;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
      arr.push_back({{"axiom_id", c.axiom_id},
                     {"samples", c.samples},
                     {"max_violation", c.max_violation},
                     {"tol", c.tol},
                     {"verdict", c.pass() ? "pass" : "fail"}});
    nlohmann::json j;
    j["checks"] = std::move(arr);
    j["condition_estimate"] = condition_estimate;
    j["all_pass"] = all_pass();
    return j;
  }
};

namespace detail {

inline double clamped(double v) { return std::max(v, 1e-12); }

/// Natural scale of <x, y | trailing>: the Gram value is 2-homogeneous in
/// each trailing slot and 1-homogeneous in x and y.
inline double gram_scale(const cvector& x, const cvector& y,
                         std::span<const cvector> trailing) {
  double s = clamped(x.norm()) * clamped(y.norm());
  for (const auto& t : trailing) s *= clamped(t.norm() * t.norm());
  return s;
}

inline std::vector<cvector> sample_trailing(rng& r, int n, int dim) {
  std::vector<cvector> t;
  for (int i = 0; i < n - 1; ++i)
    t.push_back(random_vector_with_norm(r, dim, 0.25, 2.0));
  return t;
}

} // namespace detail

/// Evaluate the seven defining conditions of an n-inner product on seeded
/// random tuples and record the worst relative violation of each.
inline axiom_report check_axioms(const n_inner_form& form, int sample_count,
                                 std::uint64_t seed, double tol) {
  if (sample_count < 1) throw config_error("check_axioms: sample_count >= 1");
  if (tol <= 0.0) throw config_error("check_axioms: tol must be positive");
  const int n = form.n;
  const int dim = form.space_dim;

  axiom_report report;
  auto add = [&](const std::string& id, double max_violation) {
    report.checks.push_back({id, sample_count, max_violation, tol});
  };

  // nI1: nonnegativity of the self-value (and reality of it).
  {
    double worst = 0.0;
    for (int i = 0; i < sample_count; ++i) {
      rng r = rng::for_sample(seed, 1, static_cast<std::uint64_t>(i));
      cvector x = random_vector_with_norm(r, dim, 0.25, 2.0);
      auto t = detail::sample_trailing(r, n, dim);
      cscalar v = gram_n_inner(form, x, x, t);
      double scale = detail::gram_scale(x, x, t);
      worst = std::max(worst, std::max(-v.real(), std::abs(v.imag())) / scale);
    }
    add("nI1", std::max(worst, 0.0));
  }

  // nI2: self-value vanishes iff {x} + trailing is linearly dependent;
  // cross-checked against numeric_rank in both directions.
  {
    double worst = 0.0;
    for (int i = 0; i < sample_count; ++i) {
      rng r = rng::for_sample(seed, 2, static_cast<std::uint64_t>(i));
      auto t = detail::sample_trailing(r, n, dim);
      bool force_dependent = (i % 2 == 0);
      cvector x(dim);
      if (force_dependent) {
        for (const auto& tv : t) x += r.disc(2.0) * tv;
        if (x.is_zero()) x = t.front(); // degenerate coefficient draw
      } else {
        x = random_vector_with_norm(r, dim, 0.25, 2.0);
      }
      cscalar v = gram_n_inner(form, x, x, t);
      double scale = detail::gram_scale(x, x, t);
      std::vector<cvector> tuple;
      tuple.push_back(x);
      tuple.insert(tuple.end(), t.begin(), t.end());
      bool dependent = numeric_rank(tuple, 1e-10) < n;
      bool near_zero = std::abs(v) <= tol * scale;
      if (dependent)
        worst = std::max(worst, std::abs(v) / scale);
      else if (near_zero)
        worst = std::max(worst, 1.0); // value vanished on an independent tuple
    }
    add("nI2", worst);
  }

  // nI3: conjugate symmetry in the first two slots.
  {
    double worst = 0.0;
    for (int i = 0; i < sample_count; ++i) {
      rng r = rng::for_sample(seed, 3, static_cast<std::uint64_t>(i));
      cvector x = random_vector_with_norm(r, dim, 0.25, 2.0);
      cvector y = random_vector_with_norm(r, dim, 0.25, 2.0);
      auto t = detail::sample_trailing(r, n, dim);
      cscalar a = gram_n_inner(form, x, y, t);
      cscalar b = gram_n_inner(form, y, x, t);
      worst = std::max(worst,
                       std::abs(a - std::conj(b)) / detail::gram_scale(x, y, t));
    }
    add("nI3", worst);
  }

  // nI4: invariance under every permutation of the trailing arguments.
  {
    double worst = 0.0;
    for (int i = 0; i < sample_count; ++i) {
      rng r = rng::for_sample(seed, 4, static_cast<std::uint64_t>(i));
      cvector x = random_vector_with_norm(r, dim, 0.25, 2.0);
      cvector y = random_vector_with_norm(r, dim, 0.25, 2.0);
      auto t = detail::sample_trailing(r, n, dim);
      cscalar ref = gram_n_inner(form, x, y, t);
      double scale = detail::gram_scale(x, y, t);
      std::vector<std::size_t> idx(t.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      do {
        std::vector<cvector> perm;
        for (std::size_t k : idx) perm.push_back(t[k]);
        cscalar v = gram_n_inner(form, x, y, perm);
        worst = std::max(worst, std::abs(v - ref) / scale);
      } while (std::next_permutation(idx.begin(), idx.end()));
    }
    add("nI4", worst);
  }

  // nI5: <x, x | x2, rest> = <x2, x2 | x, rest>.
  {
    double worst = 0.0;
    for (int i = 0; i < sample_count; ++i) {
      rng r = rng::for_sample(seed, 5, static_cast<std::uint64_t>(i));
      cvector x = random_vector_with_norm(r, dim, 0.25, 2.0);
      auto t = detail::sample_trailing(r, n, dim);
      std::vector<cvector> swapped = t;
      swapped[0] = x;
      cscalar a = gram_n_inner(form, x, x, t);
      cscalar b = gram_n_inner(form, t[0], t[0], swapped);
      worst = std::max(worst, std::abs(a - b) / detail::gram_scale(x, x, t));
    }
    add("nI5", worst);
  }

  // nI6: homogeneity in the first argument, |alpha| <= 10.
  {
    double worst = 0.0;
    for (int i = 0; i < sample_count; ++i) {
      rng r = rng::for_sample(seed, 6, static_cast<std::uint64_t>(i));
      cvector x = random_vector_with_norm(r, dim, 0.25, 2.0);
      cvector y = random_vector_with_norm(r, dim, 0.25, 2.0);
      auto t = detail::sample_trailing(r, n, dim);
      cscalar alpha = r.disc(10.0);
      cscalar a = gram_n_inner(form, alpha * x, y, t);
      cscalar b = alpha * gram_n_inner(form, x, y, t);
      double scale =
          detail::gram_scale(x, y, t) * std::max(std::abs(alpha), 1e-3);
      worst = std::max(worst, std::abs(a - b) / scale);
    }
    add("nI6", worst);
  }

  // nI7, read as additivity equality in the first argument (the printed
  // "<=" between complex values has no standard meaning; see README).
  {
    double worst = 0.0;
    for (int i = 0; i < sample_count; ++i) {
      rng r = rng::for_sample(seed, 7, static_cast<std::uint64_t>(i));
      cvector x = random_vector_with_norm(r, dim, 0.25, 2.0);
      cvector y = random_vector_with_norm(r, dim, 0.25, 2.0);
      cvector z = random_vector_with_norm(r, dim, 0.25, 2.0);
      auto t = detail::sample_trailing(r, n, dim);
      cscalar a = gram_n_inner(form, x + y, z, t);
      cscalar b = gram_n_inner(form, x, z, t);
      cscalar c = gram_n_inner(form, y, z, t);
      double scale = detail::clamped(x.norm() + y.norm()) *
                     detail::clamped(z.norm());
      for (const auto& tv : t) scale *= detail::clamped(tv.norm() * tv.norm());
      worst = std::max(worst, std::abs(a - b - c) / scale);
    }
    add("nI7", worst);
  }

  return report;
}

} // namespace nipstab
