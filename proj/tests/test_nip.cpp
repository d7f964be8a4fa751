#include <doctest.h>

#include <nipstab/nip.hpp>

#include "oracles.hpp"

using namespace nipstab;

namespace {

// Deliberately broken base: bilinear without conjugation, so conjugate
// symmetry of the form is destroyed.
n_inner_form corrupted_form(int n, int dim) {
  return {n, dim, [](const cvector& u, const cvector& v) {
            cscalar s{};
            for (std::size_t i = 0; i < u.dim(); ++i) s += u[i] * v[i];
            return s;
          }};
}

} // namespace

TEST_CASE("gram form on orthonormal vectors") {
  auto form = n_inner_form::gram(2, 2);
  auto e1 = cvector::unit(2, 0);
  auto e2 = cvector::unit(2, 1);
  std::vector<cvector> trailing{e2};
  CHECK(std::abs(gram_n_inner(form, e1, e1, trailing) - cscalar(1.0)) < 1e-15);

  std::vector<cvector> dependent{e1};
  CHECK(std::abs(gram_n_inner(form, e1, e1, dependent)) < 1e-15);
}

TEST_CASE("gram form argument checking") {
  auto form = n_inner_form::gram(3, 4);
  cvector x(4), y(4);
  CHECK_THROWS_AS(gram_n_inner(form, x, y, std::vector<cvector>{cvector(4)}),
                  arity_error);
  CHECK_THROWS_AS(
      gram_n_inner(form, cvector(3), y, std::vector<cvector>{cvector(4), cvector(4)}),
      dimension_error);
}

TEST_CASE("gram form matches the bordered-matrix Leibniz oracle") {
  auto form = n_inner_form::gram(3, 4);
  for (int i = 0; i < 50; ++i) {
    rng r = rng::for_sample(200, 0, i);
    cvector x = random_vector(r, 4, 2.0);
    cvector y = random_vector(r, 4, 2.0);
    std::vector<cvector> t{random_vector(r, 4, 2.0), random_vector(r, 4, 2.0)};

    cmatrix m(3, 3);
    m(0, 0) = inner(x, y);
    m(0, 1) = inner(x, t[0]);
    m(0, 2) = inner(x, t[1]);
    for (std::size_t row = 1; row < 3; ++row) {
      m(row, 0) = inner(t[row - 1], y);
      m(row, 1) = inner(t[row - 1], t[0]);
      m(row, 2) = inner(t[row - 1], t[1]);
    }
    cscalar expected = oracles::leibniz_det(m);
    cscalar got = gram_n_inner(form, x, y, t);
    CHECK(std::abs(got - expected) <= 1e-12 * std::max(std::abs(expected), 1.0));
  }
}

TEST_CASE("n_norm values") {
  auto form = n_inner_form::gram(2, 2);
  auto e1 = cvector::unit(2, 0);
  auto e2 = cvector::unit(2, 1);
  std::vector<cvector> trailing{e2};
  CHECK(n_norm(form, e1, trailing) == doctest::Approx(1.0));
  CHECK(n_norm(form, cscalar(2.0) * e1, trailing) == doctest::Approx(2.0));
  // x dependent on the trailing set
  CHECK(n_norm(form, e2, trailing) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("gram self-value vanishes on dependent tuples") {
  auto form = n_inner_form::gram(3, 4);
  for (int i = 0; i < 30; ++i) {
    rng r = rng::for_sample(201, 0, i);
    std::vector<cvector> t{random_vector(r, 4, 2.0), random_vector(r, 4, 2.0)};
    cvector x = r.disc(2.0) * t[0] + r.disc(2.0) * t[1];
    double scale = std::max(x.norm() * x.norm(), 1e-6);
    for (const auto& tv : t) scale *= std::max(tv.norm() * tv.norm(), 1e-6);
    CHECK(std::abs(gram_n_inner(form, x, x, t)) <= 1e-10 * scale);
  }
}

TEST_CASE("check_axioms passes for Gram forms") {
  for (int n = 2; n <= 4; ++n) {
    auto form = n_inner_form::gram(n, n + 1);
    auto rep = check_axioms(form, 100, 1, 1e-9);
    CAPTURE(n);
    CHECK(rep.all_pass());
    CHECK(rep.checks.size() == 7);
  }
}

TEST_CASE("check_axioms flags a corrupted base inner product") {
  auto rep = check_axioms(corrupted_form(2, 3), 100, 2, 1e-9);
  REQUIRE(rep.find("nI3") != nullptr);
  CHECK_FALSE(rep.find("nI3")->pass());
}

TEST_CASE("axiom report serializes") {
  auto rep = check_axioms(n_inner_form::gram(2, 3), 10, 3, 1e-9);
  auto j = rep.to_json();
  CHECK(j["checks"].size() == 7);
  CHECK(j["checks"][0].contains("axiom_id"));
  CHECK(j["checks"][0].contains("max_violation"));
  CHECK(j["checks"][0].contains("verdict"));
  CHECK(j["all_pass"] == true);
}

TEST_CASE("first-slot homogeneity holds for large scalars") {
  auto form = n_inner_form::gram(2, 3);
  for (int i = 0; i < 100; ++i) {
    rng r = rng::for_sample(202, 0, i);
    cvector x = random_vector_with_norm(r, 3, 0.25, 2.0);
    cvector y = random_vector_with_norm(r, 3, 0.25, 2.0);
    std::vector<cvector> t{random_vector_with_norm(r, 3, 0.25, 2.0)};
    cscalar alpha = r.disc(10.0);
    cscalar lhs = gram_n_inner(form, alpha * x, y, t);
    cscalar rhs = alpha * gram_n_inner(form, x, y, t);
    double scale = std::max(std::abs(rhs), 1e-6);
    CHECK(std::abs(lhs - rhs) / scale < 1e-10);
  }
}
