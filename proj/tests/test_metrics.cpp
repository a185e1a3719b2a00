#include <cmath>

#include "doctest.h"
#include "riemannopt/error.hpp"
#include "riemannopt/metrics.hpp"
#include "test_util.hpp"

using namespace riemannopt;
using riemannopt::testing::random_image;
using riemannopt::testing::random_vector;

namespace {

AttributionMap map_with(std::vector<double> values, double delta) {
  AttributionMap m;
  m.values = std::move(values);
  for (double v : m.values) m.sum += v;
  m.model_delta = delta;
  return m;
}

std::vector<double> one_hot(std::size_t d, std::size_t j) {
  std::vector<double> w(d, 0.0);
  w[j] = 1.0;
  return w;
}

}  // namespace

TEST_CASE("completeness_error") {
  CHECK(completeness_error(map_with({2.0, 3.0}, 5.0)) == 0.0);
  CHECK(completeness_error(map_with({0.75}, 1.0)) == doctest::Approx(0.25));
  CHECK(completeness_error(map_with({1.0}, -2.0)) == doctest::Approx(1.5));
  CHECK_THROWS_AS(completeness_error(map_with({1.0}, 1e-7)),
                  DegenerateInputError);
  CHECK_THROWS_AS(completeness_error(map_with({1.0}, 0.5), 0.6),
                  DegenerateInputError);
}

TEST_CASE("completeness_error is invariant to rescaling the model") {
  Rng rng(3);
  const auto w = random_vector(rng, 4);
  const InputVector x0(random_vector(rng, 4)), x(random_vector(rng, 4));
  auto path = linear_path(x0, x);
  const auto sq = QuadraticModel::sum_of_squares(4);
  const auto base = completeness_error(
      attribute(sq, *path, AlphaSchedule::uniform(5)));
  for (double c : {-3.0, 0.5, 10.0}) {
    QuadraticModel scaled(4,
                          {c, 0, 0, 0, 0, c, 0, 0, 0, 0, c, 0, 0, 0, 0, c},
                          {});
    const auto e = completeness_error(
        attribute(scaled, *path, AlphaSchedule::uniform(5)));
    CHECK(e == doctest::Approx(base).epsilon(1e-12));
  }
  for (double c : {-2.0, 7.0}) {
    std::vector<double> wc = w;
    for (double& v : wc) v *= c;
    LinearModel lin(wc);
    CHECK(completeness_error(attribute(lin, *path, AlphaSchedule({0.0, 0.9}))) <=
          1e-12);
  }
}

TEST_CASE("insertion curve endpoints are exact") {
  Rng rng(4);
  MlpInit init;
  init.input_dim = 36;
  TinyMlp m(init);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_image(rng, 6, 6);
    const auto x0 = random_image(rng, 6, 6);
    const auto attr = map_with(random_vector(rng, 36), 1.0);
    for (std::size_t steps : {1, 5, 36, 50}) {
      const auto curve = insertion_score(m, x, x0, attr, steps);
      CHECK(curve.fractions.size() == steps + 1);
      CHECK(curve.fractions.front() == 0.0);
      CHECK(curve.fractions.back() == 1.0);
      CHECK(curve.scores.front() == m.evaluate(x0));
      CHECK(curve.scores.back() == m.evaluate(x));
      const double top =
          *std::max_element(curve.scores.begin(), curve.scores.end());
      CHECK(normalized_insertion_score(curve, m.evaluate(x)) <=
            top / m.evaluate(x) + 1e-15);
    }
  }
}

TEST_CASE("constant model gives a flat curve") {
  LinearModel flat(std::vector<double>(9, 0.0), 0.7);
  Rng rng(1);
  const auto curve = insertion_score(flat, random_image(rng, 3, 3),
                                     random_image(rng, 3, 3),
                                     map_with(random_vector(rng, 9), 1.0), 4);
  for (double s : curve.scores) CHECK(s == 0.7);
  CHECK(curve.auc == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("one-pixel model: enumerated rankings") {
  // f(x) = x_2 on a 2x2 image, input all ones, baseline zeros, 4 steps.
  const std::size_t d = 4, j = 2;
  LinearModel reads_one(one_hot(d, j));
  const InputVector x(std::vector<double>(d, 1.0), ImageShape{2, 2, 1});
  const InputVector x0(std::vector<double>(d, 0.0), ImageShape{2, 2, 1});

  const auto right = insertion_score(reads_one, x, x0,
                                     map_with({0.1, 0.2, 0.9, 0.3}, 1.0), 4);
  CHECK(right.scores == std::vector<double>{0, 1, 1, 1, 1});
  CHECK(right.auc == doctest::Approx(0.875));

  const auto last = insertion_score(reads_one, x, x0,
                                    map_with({0.4, 0.5, -0.2, 0.3}, 1.0), 4);
  CHECK(last.scores == std::vector<double>{0, 0, 0, 0, 1});
  CHECK(last.auc == doctest::Approx(0.125));
  CHECK(right.auc >= last.auc);
}

TEST_CASE("one-pixel model: argmax dominates any ranking that puts it last") {
  Rng rng(12);
  const std::size_t d = 16;
  for (int trial = 0; trial < 20; ++trial) {
    const auto j = static_cast<std::size_t>(rng.uniform(0, d));
    LinearModel reads_one(one_hot(d, j));
    const auto x = random_image(rng, 4, 4, 0.5, 1.0);
    const auto x0 = random_image(rng, 4, 4, 0.0, 0.4);
    auto good = random_vector(rng, d);
    good[j] = 2.0;
    auto bad = random_vector(rng, d);
    bad[j] = -2.0;
    for (std::size_t steps : {3, 8, 16}) {
      const auto a = insertion_score(reads_one, x, x0, map_with(good, 1.0), steps);
      const auto b = insertion_score(reads_one, x, x0, map_with(bad, 1.0), steps);
      CHECK(a.auc >= b.auc);
    }
  }
}

TEST_CASE("multi-channel ranking sums channels and swaps whole pixels") {
  // 1x2 image with 2 channels; pixel 1 has the larger channel sum.
  LinearModel m({1.0, 1.0, 0.0, 0.0});
  const InputVector x({1.0, 1.0, 1.0, 1.0}, ImageShape{1, 2, 2});
  const InputVector x0({0.0, 0.0, 0.0, 0.0}, ImageShape{1, 2, 2});
  const auto curve =
      insertion_score(m, x, x0, map_with({0.6, -0.5, 0.3, 0.3}, 1.0), 2);
  // Pixel 1 (sum 0.6) goes first and the model does not read it.
  CHECK(curve.scores == std::vector<double>{0.0, 0.0, 2.0});
}

TEST_CASE("ties rank the lower pixel index first") {
  LinearModel m({1.0, 0.0, 0.0});
  const InputVector x({1.0, 1.0, 1.0});
  const InputVector x0({0.0, 0.0, 0.0});
  const auto curve = insertion_score(m, x, x0, map_with({0.0, 0.0, 0.0}, 1.0), 3);
  CHECK(curve.scores == std::vector<double>{0.0, 1.0, 1.0, 1.0});
}

TEST_CASE("insertion errors") {
  LinearModel m({1.0, 1.0});
  const InputVector x({1.0, 1.0});
  CHECK_THROWS_AS(insertion_score(m, x, x, map_with({0, 0}, 1), 0), DomainError);
  CHECK_THROWS_AS(insertion_score(m, x, InputVector({1.0}), map_with({0, 0}, 1), 2),
                  InputShapeError);
}

TEST_CASE("normalized insertion score") {
  InsertionCurve perfect{{0.0, 0.5, 1.0}, {0.8, 0.8, 0.8}, 0.8};
  CHECK(normalized_insertion_score(perfect, 0.8) == doctest::Approx(1.0));
  InsertionCurve zero{{0.0, 1.0}, {0.0, 0.0}, 0.0};
  CHECK(normalized_insertion_score(zero, 0.3) == 0.0);
  InsertionCurve c{{0.0, 1.0}, {0.0, 0.72}, 0.36};
  CHECK(normalized_insertion_score(c, 0.8) == doctest::Approx(0.45));
  CHECK_THROWS_AS(normalized_insertion_score(c, 1e-13), DegenerateInputError);
}

TEST_CASE("aggregate") {
  const Summary a = aggregate(std::vector<double>{1, 2, 3});
  CHECK(a.mean == 2.0);
  CHECK(a.median == 2.0);
  CHECK(a.count == 3);
  const Summary b = aggregate(std::vector<double>{5});
  CHECK(b.mean == 5.0);
  CHECK(b.median == 5.0);
  CHECK(b.count == 1);
  CHECK(aggregate(std::vector<double>{4, 1, 3, 2}).median == 2.0);
  CHECK_THROWS_AS(aggregate(std::vector<double>{}), DomainError);
}
