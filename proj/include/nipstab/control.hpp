#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>
#include <sstream>
#include <string>
#include <string_view>

#include "complex_linalg.hpp"
#include "errors.hpp"

namespace nipstab {

/// ||x||^p with the convention 0^p = 0 for every p >= 0, so that padding an
/// argument tuple with zero vectors is neutral.
inline double pow_norm(double n, double p) {
  if (n == 0.0) return 0.0;
  return std::pow(n, p);
}

enum class scheme_id { doubling, jensen_tripling, jensen_shrinking };

/// One of the three direct-method approximation schemes. `ascending`
/// schemes build U_l(x) = b^-l f(b^l x); the shrinking scheme builds
/// U_l(x) = 3^l f(x / 3^l).
struct scheme {
  scheme_id id;
  int base;
  bool ascending;
  std::string_view name;

  static const scheme& doubling() {
    static const scheme s{scheme_id::doubling, 2, true, "DOUBLING"};
    return s;
  }
  static const scheme& jensen_tripling() {
    static const scheme s{scheme_id::jensen_tripling, 3, true, "JENSEN_TRIPLING"};
    return s;
  }
  static const scheme& jensen_shrinking() {
    static const scheme s{scheme_id::jensen_shrinking, 3, false, "JENSEN_SHRINKING"};
    return s;
  }

  /// Case-insensitive lookup; "tripling"/"shrinking" accepted as shorthand.
  static const scheme& by_name(std::string_view name) {
    std::string up(name);
    for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "DOUBLING") return doubling();
    if (up == "JENSEN_TRIPLING" || up == "TRIPLING") return jensen_tripling();
    if (up == "JENSEN_SHRINKING" || up == "SHRINKING") return jensen_shrinking();
    throw config_error("unknown scheme: " + std::string(name));
  }

  /// Term ratio of the weighted series for a degree-p power control.
  double power_ratio(double p) const {
    return ascending ? std::pow(static_cast<double>(base), p - 1.0)
                     : std::pow(3.0, 1.0 - p);
  }

  /// Validity interval of the closed-form constants. The shrinking scheme
  /// needs p > 2n (n = 1 for the plain Hilbert-space setting).
  bool p_valid(double p, int n = 1) const {
    return ascending ? (p >= 0.0 && p < 1.0) : (p > 2.0 * n);
  }

  std::string validity_interval(int n = 1) const {
    if (ascending) return "[0, 1)";
    std::ostringstream os;
    os << "(" << 2 * n << ", inf)";
    return os.str();
  }

  void require_valid(double p, int n = 1) const {
    if (!p_valid(p, n)) {
      std::ostringstream os;
      os << "scheme " << name << ": p = " << p
         << " outside validity interval " << validity_interval(n);
      throw divergence_error(os.str());
    }
  }
};

/// The perturbation budget: either the power form theta * sum_j ||x_j||^p
/// or a user-supplied nonnegative function of the argument tuple.
class control_function {
public:
  enum class kind_t { power, table };
  using table_fn = std::function<double(std::span<const cvector>)>;

  static control_function power(double theta, double p, int arity = 2) {
    if (theta < 0.0) throw config_error("control_function: theta must be >= 0");
    if (p < 0.0) throw config_error("control_function: p must be >= 0");
    if (arity < 2) throw config_error("control_function: arity must be >= 2");
    control_function cf;
    cf.kind_ = kind_t::power;
    cf.theta_ = theta;
    cf.p_ = p;
    cf.arity_ = arity;
    return cf;
  }

  /// `growth_degree`, when supplied, declares the total homogeneity degree
  /// of the table function and lets phi_tilde use the scheme's analytic
  /// term ratio for its tail majorant.
  static control_function table(int arity, table_fn fn,
                                std::optional<double> growth_degree = {}) {
    if (arity < 2) throw config_error("control_function: arity must be >= 2");
    control_function cf;
    cf.kind_ = kind_t::table;
    cf.arity_ = arity;
    cf.fn_ = std::move(fn);
    cf.growth_degree_ = growth_degree;
    return cf;
  }

  kind_t kind() const { return kind_; }
  double theta() const { return theta_; }
  double p() const { return p_; }
  int arity() const { return arity_; }
  std::optional<double> growth_degree() const { return growth_degree_; }

  double operator()(std::span<const cvector> args) const {
    if (static_cast<int>(args.size()) != arity_)
      throw arity_error("control_function: wrong argument count");
    if (kind_ == kind_t::power) {
      double s = 0.0;
      for (const auto& a : args) s += pow_norm(a.norm(), p_);
      return theta_ * s;
    }
    double v = fn_(args);
    if (!(v >= 0.0))
      throw axiom_violation_error("control_function: table value must be >= 0");
    return v;
  }

private:
  control_function() = default;

  kind_t kind_ = kind_t::power;
  double theta_ = 0.0;
  double p_ = 0.0;
  int arity_ = 2;
  table_fn fn_;
  std::optional<double> growth_degree_;
};

struct phi_tilde_result {
  double value = 0.0;
  double tail = 0.0; // certified remainder bound; 0 for closed forms
  int terms_used = 0;
};

/// The scheme-weighted series of a control function:
///   ascending:  sum_j b^-j phi(b^j args)
///   shrinking:  sum_j 3^j  phi(args / 3^j)
/// Power controls get the exact geometric closed form; table controls are
/// summed until a geometric-majorant tail drops below tol.
inline phi_tilde_result phi_tilde(const control_function& cf, const scheme& s,
                                  std::span<const cvector> args,
                                  double tol = 1e-12) {
  if (static_cast<int>(args.size()) != cf.arity())
    throw arity_error("phi_tilde: wrong argument count");

  if (cf.kind() == control_function::kind_t::power) {
    double r = s.power_ratio(cf.p());
    if (!(r < 1.0)) {
      std::ostringstream os;
      os << "phi_tilde: series diverges for scheme " << s.name << " at p = "
         << cf.p() << "; validity interval is " << s.validity_interval();
      throw divergence_error(os.str());
    }
    double first = cf(args);
    return {first / (1.0 - r), 0.0, 0};
  }

  const double grow = s.ascending ? static_cast<double>(s.base) : (1.0 / 3.0);
  const double weight_step = s.ascending ? 1.0 / s.base : 3.0;

  std::vector<cvector> scaled(args.begin(), args.end());
  double weight = 1.0;
  double total = 0.0;
  double prev_term = -1.0;
  constexpr int max_terms = 100000;
  for (int j = 0; j < max_terms; ++j) {
    double term = weight * cf(scaled);
    total += term;
    double ratio;
    if (cf.growth_degree() && s.power_ratio(*cf.growth_degree()) < 1.0) {
      ratio = s.power_ratio(*cf.growth_degree());
    } else if (prev_term > 0.0) {
      ratio = std::clamp(term / prev_term, 0.0, 0.99);
    } else {
      ratio = 0.99;
    }
    double tail = term * ratio / (1.0 - ratio);
    if (term == 0.0) return {total, 0.0, j + 1};
    if (j >= 1 && tail <= tol) return {total, tail, j + 1};
    prev_term = term;
    weight *= weight_step;
    for (auto& v : scaled) v *= cscalar(grow);
  }
  throw divergence_error("phi_tilde: table series failed to converge");
}

inline phi_tilde_result phi_tilde(const control_function& cf, const scheme& s,
                                  const std::vector<cvector>& args,
                                  double tol = 1e-12) {
  return phi_tilde(cf, s, std::span<const cvector>(args), tol);
}

/// The closed-form Cauchy--Rassias bound on
/// ||f(x) - U(x)|| for the power control with parameters (theta, p).
inline double closed_form_bound(const scheme& s, double theta, double p,
                                double norm_x, int n = 1) {
  s.require_valid(p, n);
  double np = pow_norm(norm_x, p);
  switch (s.id) {
    case scheme_id::doubling:
      return 2.0 * theta / (2.0 - std::pow(2.0, p)) * np;
    case scheme_id::jensen_tripling:
      return (3.0 + std::pow(3.0, p)) / (3.0 - std::pow(3.0, p)) * theta * np;
    case scheme_id::jensen_shrinking:
      return (std::pow(3.0, p) + 3.0) / (std::pow(3.0, p) - 3.0) * theta * np;
  }
  throw config_error("closed_form_bound: unreachable");
}

namespace detail {

inline std::vector<cvector> padded_pair(const cvector& a, const cvector& b,
                                        int arity) {
  std::vector<cvector> args{a, b};
  for (int i = 2; i < arity; ++i) args.push_back(cvector::zero(a.dim()));
  return args;
}

} // namespace detail

/// The Jensen-scheme stability bound
///   (1/3) (phi_tilde(x, -x) + phi_tilde(-x, 3x))
/// with the tripling series; n-ary controls are padded with zeros.
inline double jun_lee_bound(const control_function& cf, const cvector& x) {
  const scheme& s = scheme::jensen_tripling();
  auto a = phi_tilde(cf, s, detail::padded_pair(x, -x, cf.arity()));
  auto b = phi_tilde(cf, s, detail::padded_pair(-x, cscalar(3.0) * x, cf.arity()));
  return (a.value + a.tail + b.value + b.tail) / 3.0;
}

/// Exact sum of the one-step iterate gap bounds from level l_from on, for a
/// power control. At l_from = 0 this reproduces closed_form_bound.
inline double analytic_tail_bound(const scheme& s, double theta, double p,
                                  double norm_x, int l_from) {
  double np = pow_norm(norm_x, p);
  double r = s.power_ratio(p);
  if (!(r < 1.0))
    throw divergence_error("analytic_tail_bound: nonconvergent parameters");
  double rl = std::pow(r, l_from);
  switch (s.id) {
    case scheme_id::doubling:
      return theta * np * rl / (1.0 - r);
    case scheme_id::jensen_tripling:
      return theta * np / 3.0 * (3.0 + std::pow(3.0, p)) * rl / (1.0 - r);
    case scheme_id::jensen_shrinking:
      return theta * np * (1.0 + std::pow(3.0, 1.0 - p)) * rl / (1.0 - r);
  }
  throw config_error("analytic_tail_bound: unreachable");
}

} // namespace nipstab
