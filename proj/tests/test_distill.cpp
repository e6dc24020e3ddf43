#include <cmath>
#include <random>

#include "checkout/distill.hpp"
#include "checkout/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace checkout;

namespace {

// Eq. form evaluated directly, extended off the simplex for finite differences
double raw_kl(const std::vector<double>& y_st, const std::vector<double>& y_te) {
  double loss = 0.0;
  for (std::size_t k = 0; k < y_st.size(); ++k) {
    if (y_st[k] == 0.0) continue;
    loss += y_st[k] * std::log(y_st[k] / std::max(y_te[k], 1e-12));
  }
  return loss;
}

}  // namespace

TEST_SUITE_BEGIN("distill_loss");

TEST_CASE("loss of identical distributions is zero") {
  const std::vector<double> p{0.2, 0.3, 0.5};
  CHECK(distill::kl_similarity_loss(p, p) == 0.0);

  std::mt19937_64 rng(89);
  for (int i = 0; i < 100; ++i) {
    const auto q = oracles::random_simplex(rng, 6);
    CHECK(std::abs(distill::kl_similarity_loss(q, q)) <= 1e-12);
  }
}

TEST_CASE("hand-computed loss values") {
  CHECK(distill::kl_similarity_loss(std::vector<double>{1.0, 0.0},
                                    std::vector<double>{0.5, 0.5}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const double want = 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1);
  CHECK(distill::kl_similarity_loss(std::vector<double>{0.5, 0.5},
                                    std::vector<double>{0.9, 0.1}) ==
        doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("non-negativity over random simplex pairs") {
  std::mt19937_64 rng(97);
  std::uniform_int_distribution<std::size_t> len(2, 10);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = len(rng);
    const auto p = oracles::random_simplex(rng, n);
    const auto q = oracles::random_simplex(rng, n);
    CHECK(distill::kl_similarity_loss(p, q) >= -1e-12);
  }
}

TEST_CASE("loss is zero only for equal distributions") {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 200; ++i) {
    const auto p = oracles::random_simplex_bounded(rng, 5);
    auto q = oracles::random_simplex_bounded(rng, 5);
    if (std::equal(p.begin(), p.end(), q.begin())) continue;
    CHECK(distill::kl_similarity_loss(p, q) > 0.0);
  }
}

TEST_CASE("loss is invariant under a common permutation") {
  std::mt19937_64 rng(103);
  for (int i = 0; i < 200; ++i) {
    const auto p = oracles::random_simplex(rng, 7);
    const auto q = oracles::random_simplex(rng, 7);
    std::vector<std::size_t> perm{0, 1, 2, 3, 4, 5, 6};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> p2(7), q2(7);
    for (std::size_t k = 0; k < 7; ++k) {
      p2[k] = p[perm[k]];
      q2[k] = q[perm[k]];
    }
    CHECK(distill::kl_similarity_loss(p2, q2) ==
          doctest::Approx(distill::kl_similarity_loss(p, q)).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradient: closed forms") {
  const std::vector<double> p{0.25, 0.75};
  const auto at_equal = distill::kl_gradient(p, p);
  CHECK(at_equal[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at_equal[1] == doctest::Approx(1.0).epsilon(1e-12));

  const auto g = distill::kl_gradient(std::vector<double>{0.5, 0.5},
                                      std::vector<double>{0.25, 0.75});
  CHECK(g[0] == doctest::Approx(std::log(2.0) + 1.0).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(std::log(2.0 / 3.0) + 1.0).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
  std::mt19937_64 rng(107);
  std::uniform_int_distribution<std::size_t> len(2, 8);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = len(rng);
    const auto p = oracles::random_simplex_bounded(rng, n);
    const auto q = oracles::random_simplex_bounded(rng, n);
    const auto analytic = distill::kl_gradient(p, q);
    const auto numeric = oracles::finite_difference_gradient(p, q, raw_kl, 1e-6);
    for (std::size_t k = 0; k < n; ++k) {
      const double rel = std::abs(analytic[k] - numeric[k]) /
                         std::max(std::abs(numeric[k]), 1e-8);
      CHECK(rel <= 1e-5);
    }
  }
}

TEST_CASE("weighted loss scales exactly") {
  const std::vector<double> p{0.2, 0.8};
  const std::vector<double> q{0.6, 0.4};
  const double base = distill::kl_similarity_loss(p, q);
  CHECK(distill::weighted_similarity_loss(p, q, 2.0) == 2.0 * base);
  CHECK(distill::weighted_similarity_loss(p, q, 1.0) == base);
  CHECK(distill::weighted_similarity_loss(p, p, 2.0) == 0.0);
  CHECK_THROWS_AS(distill::weighted_similarity_loss(p, q, 0.0), ValidationError);
  CHECK_THROWS_AS(distill::weighted_similarity_loss(p, q, -1.0), ValidationError);
}

TEST_CASE("length mismatch and invalid vectors are rejected") {
  CHECK_THROWS_AS(distill::kl_similarity_loss(std::vector<double>{1.0},
                                              std::vector<double>{0.5, 0.5}),
                  ValidationError);
  CHECK_THROWS_AS(distill::kl_gradient(std::vector<double>{1.0},
                                       std::vector<double>{0.5, 0.5}),
                  ValidationError);
  CHECK_THROWS_AS(distill::kl_similarity_loss(std::vector<double>{0.7, 0.7},
                                              std::vector<double>{0.5, 0.5}),
                  ValidationError);
}

TEST_SUITE_END();
