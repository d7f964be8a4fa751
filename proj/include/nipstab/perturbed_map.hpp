#pragma once

#include <cstdint>
#include <string_view>

#include "complex_linalg.hpp"
#include "control.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace nipstab {

/// Which functional-equation defect the perturbation is built to respect.
enum class perturbation_mode { cauchy_respecting, jensen_respecting };

inline std::string_view to_string(perturbation_mode m) {
  return m == perturbation_mode::cauchy_respecting ? "CAUCHY_RESPECTING"
                                                   : "JENSEN_RESPECTING";
}

inline perturbation_mode mode_for(const scheme& s) {
  return s.id == scheme_id::doubling ? perturbation_mode::cauchy_respecting
                                     : perturbation_mode::jensen_respecting;
}

/// f = L + delta: a linear map plus a seeded bounded perturbation with
/// f(0) = 0. The perturbation is
///
///   delta(x) = (theta/3) ||x||^p * g(x),   ||g(x)|| <= 1,  g(0) = 0,
///
/// where the direction and amplitude of g come from hashing the coordinate
/// bits of x under the map's seed, so the field oscillates across scales.
/// The per-point cap (theta/3) ||x||^p makes both the Cauchy defect
/// ||f(mu x + mu y) - mu f(x) - mu f(y)|| and the Jensen defect
/// ||2 f((mu x + mu y)/2) - mu f(x) - mu f(y)|| stay below
/// theta (||x||^p + ||y||^p) by the triangle inequality, for p in [0,1)
/// and for p > 2 respectively.
class perturbed_map {
public:
  perturbed_map(cmatrix linear, double theta, double p, std::uint64_t seed,
                perturbation_mode mode)
      : linear_(std::move(linear)), theta_(theta), p_(p), seed_(seed),
        mode_(mode) {
    if (theta_ < 0.0) throw config_error("perturbed_map: theta must be >= 0");
    if (p_ < 0.0) throw config_error("perturbed_map: p must be >= 0");
  }

  std::size_t domain_dim() const { return linear_.cols(); }
  std::size_t codomain_dim() const { return linear_.rows(); }
  double theta() const { return theta_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  perturbation_mode mode() const { return mode_; }
  const cmatrix& linear_part() const { return linear_; }

  control_function control(int arity = 2) const {
    return control_function::power(theta_, p_, arity);
  }

  cvector linear_image(const cvector& x) const { return linear_.apply(x); }

  cvector perturbation(const cvector& x) const {
    if (x.dim() != domain_dim())
      throw dimension_error("perturbed_map: dimension mismatch");
    cvector d = cvector::zero(codomain_dim());
    if (theta_ == 0.0 || x.is_zero()) return d;

    std::uint64_t h = fnv_offset_basis ^ seed_;
    for (const auto& c : x.coords()) {
      h = fnv1a64(h, c.real());
      h = fnv1a64(h, c.imag());
    }
    rng r(h);
    double gn2 = 0.0;
    for (std::size_t i = 0; i < d.dim(); ++i) {
      d[i] = cscalar(r.uniform(-1.0, 1.0), r.uniform(-1.0, 1.0));
      gn2 += std::norm(d[i]);
    }
    if (gn2 == 0.0) return cvector::zero(codomain_dim());
    double amp = (theta_ / 3.0) * pow_norm(x.norm(), p_) * r.uniform01();
    return (amp / std::sqrt(gn2)) * d;
  }

  cvector operator()(const cvector& x) const {
    cvector y = linear_image(x);
    y += perturbation(x);
    return y;
  }

private:
  cmatrix linear_;
  double theta_;
  double p_;
  std::uint64_t seed_;
  perturbation_mode mode_;
};

} // namespace nipstab
