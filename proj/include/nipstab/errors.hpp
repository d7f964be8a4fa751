#pragma once

#include <stdexcept>
#include <string>

namespace nipstab {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Operands have incompatible vector dimensions.
class dimension_error : public error {
public:
  using error::error;
};

/// Matrix shape is unusable (non-square where a determinant is needed,
/// or beyond the small-dense size cap).
class shape_error : public error {
public:
  using error::error;
};

/// Wrong number of trailing arguments for an n-inner form.
class arity_error : public error {
public:
  using error::error;
};

/// A quantity that must be (near-)real or nonnegative came out otherwise,
/// indicating a broken base inner product.
class axiom_violation_error : public error {
public:
  using error::error;
};

/// Anchor set for an induced inner product is linearly dependent.
class anchor_error : public error {
public:
  using error::error;
};

/// Series parameters outside the convergence/validity interval.
class divergence_error : public error {
public:
  using error::error;
};

/// A scalar that must lie on the unit circle does not.
class unit_scalar_error : public error {
public:
  using error::error;
};

/// Iterate scaling left the representable range.
class scale_overflow_error : public error {
public:
  using error::error;
};

/// Bad experiment configuration.
class config_error : public error {
public:
  using error::error;
};

} // namespace nipstab
