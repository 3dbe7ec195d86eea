#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qrc/evaluation.hpp"

using namespace qrc;

TEST_CASE("pearson examples") {
  const std::vector<double> x{1, 2, 3};
  CHECK(pearson(x, x).value.value() == doctest::Approx(1.0));
  CHECK(pearson(x, std::vector<double>{3, 2, 1}).value.value() == doctest::Approx(-1.0));
  CHECK(pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}).value.value() ==
        doctest::Approx(0.8));
}

TEST_CASE("pearson missing values") {
  const auto flat = pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 2, 2});
  CHECK_FALSE(flat.has_value());
  CHECK_FALSE(flat.reason.empty());
  CHECK_FALSE(pearson(std::vector<double>{1}, std::vector<double>{1}).has_value());
  CHECK_FALSE(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}).has_value());
}

TEST_CASE("pearson symmetry, bounds and affine invariance") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(30), y(30);
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] = g(rng);
      y[k] = 0.4 * x[k] + g(rng);
    }
    const double r = *pearson(x, y).value;
    CHECK(std::abs(r - *pearson(y, x).value) < 1e-15);
    CHECK_FALSE((r < -1.0 || r > 1.0));
    std::vector<double> ax(x);
    for (double& v : ax) v = 3.5 * v - 2.0;
    CHECK(std::abs(r - *pearson(ax, y).value) < 1e-12);
  }
}

TEST_CASE("correlation report against a perfect estimate") {
  ScoreSet s;
  s.quality.values = {0.2, 0.9, 0.4};
  s.reputation.values = {0.1, 0.3};
  GroundTruth t;
  t.fitness = {0.2, 0.9, 0.4};
  t.created_at = {0, 1, 2};
  t.ability = {0.5, 0.6};
  t.activity = {0.7, 0.7};
  const auto rep = correlation_report(s, t);
  CHECK(rep.quality_fitness.value.value() == doctest::Approx(1.0));
  CHECK(rep.reputation_ability.value.value() == doctest::Approx(1.0));
  CHECK_FALSE(rep.reputation_activity.has_value());
  t.fitness.pop_back();
  CHECK_THROWS_AS(correlation_report(s, t), DataError);
}

TEST_CASE("top_k ordering and ties") {
  const std::vector<double> s{0.1, 0.9, 0.5};
  CHECK(top_k(s, 2).ids == std::vector<Index>{1, 2});
  CHECK(top_k(std::vector<double>{0.3, 0.3, 0.3}, 2).ids == std::vector<Index>{0, 1});
  const auto all = top_k(s, 3);
  CHECK(all.ids == std::vector<Index>{1, 2, 0});
  CHECK_FALSE(all.truncated);
  const auto more = top_k(s, 10);
  CHECK(more.truncated);
  CHECK(more.ids.size() == 3);
  CHECK_THROWS_AS(top_k(s, 0), DataError);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<double> x(40);
  for (double& v : x) v = u(rng);
  std::vector<double> fx(x);
  for (double& v : fx) v = std::exp(3 * v) + 1;
  CHECK(top_k(x, 15).ids == top_k(fx, 15).ids);
}

TEST_CASE("top-k report on arithmetic metadata") {
  std::vector<std::optional<PaperMetadata>> meta(25);
  std::vector<double> scores(25);
  for (Index i = 0; i < 25; ++i) {
    meta[i] = PaperMetadata{std::to_string(i), 10L * i, 3.0 * i + 1, 2.0 * i, 0.5 * i};
    scores[i] = i;
  }
  const auto ranking = top_k(scores, 5).ids;
  const auto rep = top_k_report(ranking, meta);
  CHECK(rep.k == 5);
  // Top five are 20..24: mean index 22, sample sd sqrt(2.5).
  const double se_index = std::sqrt(2.5) / std::sqrt(5.0);
  CHECK(rep.submission_day.mean == doctest::Approx(220));
  CHECK(rep.submission_day.se == doctest::Approx(10 * se_index));
  CHECK(rep.downloads.mean == doctest::Approx(67));
  CHECK(rep.downloads.se == doctest::Approx(3 * se_index));
  CHECK(rep.citations.mean == doctest::Approx(44));
  CHECK(rep.impact_factor.mean == doctest::Approx(11));
  CHECK(rep.impact_factor.se == doctest::Approx(0.5 * se_index));

  const auto one = top_k_report(std::vector<Index>{7}, meta);
  CHECK(one.singleton);
  CHECK(one.citations.mean == 14);
  CHECK(one.citations.se == 0);

  meta[24].reset();
  CHECK_THROWS_AS(top_k_report(ranking, meta), DataError);
}

TEST_CASE("Mann-Whitney examples") {
  const auto sep = mann_whitney_u(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6});
  CHECK(sep.u == 0);
  CHECK(sep.exact);
  CHECK(sep.p_value == doctest::Approx(0.1));

  const std::vector<double> same{2, 4, 4, 7};
  CHECK(mann_whitney_u(same, same, Alternative::TwoSided, PValueMethod::Exact).p_value == 1.0);

  const std::vector<double> a{1, 3, 5}, b{2, 4};
  const auto got = mann_whitney_u(a, b);
  const auto ref = oracle::mann_whitney_enumerate(a, b);
  CHECK(got.u == ref.u_observed);
  CHECK(got.u == 3);
  CHECK(std::abs(got.p_value - ref.p_two_sided) < 1e-12);
  CHECK(ref.p_two_sided == 1.0);

  CHECK_THROWS_AS(mann_whitney_u(std::vector<double>{}, b), DataError);
}

TEST_CASE("Mann-Whitney exact p against enumeration with ties") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> level(0, 4);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t na = 1 + rng() % 6, nb = 1 + rng() % 6;
    std::vector<double> a(na), b(nb);
    for (double& v : a) v = level(rng);
    for (double& v : b) v = level(rng);
    const auto ref = oracle::mann_whitney_enumerate(a, b);
    for (auto [alt, expect] : {std::pair{Alternative::TwoSided, ref.p_two_sided},
                               std::pair{Alternative::Less, ref.p_less},
                               std::pair{Alternative::Greater, ref.p_greater}}) {
      const auto got = mann_whitney_u(a, b, alt, PValueMethod::Exact);
      CHECK(got.u == ref.u_observed);
      CHECK(std::abs(got.p_value - expect) < 1e-12);
    }
  }
}

TEST_CASE("Mann-Whitney method selection") {
  std::vector<double> a(8), b(8);
  for (int k = 0; k < 8; ++k) {
    a[k] = k;
    b[k] = k + 0.5;
  }
  CHECK_FALSE(mann_whitney_u(a, b).exact);
  a.pop_back();
  CHECK(mann_whitney_u(a, b).exact);
  const auto normal = mann_whitney_u(a, b, Alternative::TwoSided, PValueMethod::Normal);
  CHECK_FALSE(normal.exact);
  CHECK(normal.p_value == doctest::Approx(mann_whitney_u(a, b).p_value).epsilon(0.1));
}

TEST_CASE("degree distribution") {
  const auto rows = degree_distribution(std::vector<Index>{1, 1, 2});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].degree == 1);
  CHECK(rows[0].fraction_at_least == 1.0);
  CHECK(rows[1].degree == 2);
  CHECK(rows[1].fraction_at_least == doctest::Approx(1.0 / 3));
  CHECK(degree_distribution(std::vector<Index>{}).empty());
  CHECK(degree_distribution(std::vector<Index>{0, 0}).empty());
  CHECK(degree_distribution(std::vector<Index>{0, 3}).front().degree == 3);

  // The mean degree is recoverable as the area under the table.
  const std::vector<Index> degs{1, 4, 4, 7, 2, 9, 1, 3};
  const auto t = degree_distribution(degs);
  double area = 0;
  Index prev = 0;
  for (const auto& r : t) {
    area += (r.degree - prev) * r.fraction_at_least;
    prev = r.degree;
  }
  CHECK(area == doctest::Approx(31.0 / 8));
}
