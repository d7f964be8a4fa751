#pragma once

#include <utility>
#include <vector>

#include "complex_linalg.hpp"
#include "errors.hpp"
#include "nip.hpp"

namespace nipstab {

/// Ordinary inner product induced by an n-inner form and a fixed linearly
/// independent anchor set {a_1, ..., a_n}:
///
///   <x, y> = k * sum over the n (n-1)-element anchor subsets of
///            <x, y | a_{i_2}, ..., a_{i_n}>
///
/// The subsets are enumerated omitting a_1 first, then a_2, etc., so the
/// floating-point summation order is reproducible.
class induced_inner_product {
public:
  induced_inner_product(n_inner_form source, std::vector<cvector> anchors,
                        double k = 1.0)
      : source_(std::move(source)), anchors_(std::move(anchors)), k_(k) {
    if (k_ <= 0.0) throw config_error("induced_inner_product: k must be > 0");
    if (anchors_.size() != static_cast<std::size_t>(source_.n))
      throw anchor_error("induced_inner_product: need exactly n anchors");
    if (numeric_rank(anchors_, 1e-10) != source_.n)
      throw anchor_error("induced_inner_product: anchors are linearly dependent");
    condition_estimate_ = gram_condition_estimate(anchors_);
  }

  const n_inner_form& source() const { return source_; }
  const std::vector<cvector>& anchors() const { return anchors_; }
  double k() const { return k_; }
  double condition_estimate() const { return condition_estimate_; }

  cscalar operator()(const cvector& x, const cvector& y) const {
    const std::size_t n = anchors_.size();
    cscalar sum{};
    std::vector<cvector> trailing;
    trailing.reserve(n - 1);
    for (std::size_t omit = 0; omit < n; ++omit) {
      trailing.clear();
      for (std::size_t i = 0; i < n; ++i)
        if (i != omit) trailing.push_back(anchors_[i]);
      sum += gram_n_inner(source_, x, y, trailing);
    }
    return k_ * sum;
  }

private:
  n_inner_form source_;
  std::vector<cvector> anchors_;
  double k_;
  double condition_estimate_;
};

/// Check on seeded samples that the induced form really is an inner
/// product: conjugate symmetry, first-argument additivity and homogeneity,
/// and positive definiteness (with rank-based zero detection). The anchor
/// Gram condition estimate rides along in the report.
inline axiom_report verify_inner_product(const induced_inner_product& ii,
                                         int sample_count, std::uint64_t seed,
                                         double tol) {
  if (sample_count < 1)
    throw config_error("verify_inner_product: sample_count >= 1");
  const int dim = ii.source().space_dim;

  // Homogeneity scale of the anchor part of the sum.
  double anchor_scale = 0.0;
  {
    const auto& a = ii.anchors();
    for (std::size_t omit = 0; omit < a.size(); ++omit) {
      double prod = 1.0;
      for (std::size_t i = 0; i < a.size(); ++i)
        if (i != omit) prod *= std::max(a[i].norm() * a[i].norm(), 1e-12);
      anchor_scale += prod;
    }
    anchor_scale = std::max(anchor_scale * ii.k(), 1e-12);
  }

  axiom_report report;
  report.condition_estimate = ii.condition_estimate();
  auto add = [&](const std::string& id, double worst) {
    report.checks.push_back({id, sample_count, worst, tol});
  };

  double worst_sym = 0.0, worst_add = 0.0, worst_hom = 0.0, worst_pos = 0.0;
  for (int i = 0; i < sample_count; ++i) {
    rng r = rng::for_sample(seed, 11, static_cast<std::uint64_t>(i));
    cvector x = random_vector_with_norm(r, dim, 0.25, 2.0);
    cvector y = random_vector_with_norm(r, dim, 0.25, 2.0);
    cvector z = random_vector_with_norm(r, dim, 0.25, 2.0);
    cscalar alpha = r.disc(10.0);

    double sxy = std::max(x.norm() * y.norm(), 1e-12) * anchor_scale;
    worst_sym = std::max(worst_sym,
                         std::abs(ii(x, y) - std::conj(ii(y, x))) / sxy);

    double sadd = std::max((x.norm() + y.norm()) * z.norm(), 1e-12) * anchor_scale;
    worst_add = std::max(
        worst_add, std::abs(ii(x + y, z) - ii(x, z) - ii(y, z)) / sadd);

    double shom = sxy * std::max(std::abs(alpha), 1e-3);
    worst_hom =
        std::max(worst_hom, std::abs(ii(alpha * x, y) - alpha * ii(x, y)) / shom);

    cscalar self = ii(x, x);
    double spos = std::max(x.norm() * x.norm(), 1e-12) * anchor_scale;
    worst_pos = std::max(
        worst_pos, std::max(-self.real(), std::abs(self.imag())) / spos);
    // Definiteness: a nonzero sample must not annihilate the form.
    std::vector<cvector> just_x{x};
    if (numeric_rank(just_x, 1e-10) == 1 && std::abs(self) <= tol * spos)
      worst_pos = std::max(worst_pos, 1.0);
  }
  add("conjugate_symmetry", worst_sym);
  add("additivity", worst_add);
  add("homogeneity", worst_hom);
  add("positivity", worst_pos);
  return report;
}

} // namespace nipstab
