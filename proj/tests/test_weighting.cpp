#include <doctest.h>

#include <cmath>
#include <sstream>

#include "generators.hpp"
#include "mbl/weighting.hpp"
#include "oracles.hpp"

using namespace mbl;

namespace {

Dataset labels(std::initializer_list<std::pair<const char*, std::size_t>> counts) {
  std::vector<Pattern> rows;
  for (const auto& [label, n] : counts)
    for (std::size_t i = 0; i < n; ++i) rows.push_back(Pattern{{FeatureValue::symbol("x")}, label});
  return Dataset::build({FeatureKind::Symbolic}, std::move(rows));
}

}  // namespace

TEST_CASE("database entropy") {
  CHECK(database_entropy(labels({{"yes", 2}, {"no", 2}})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(database_entropy(labels({{"yes", 5}})) == 0.0);
  CHECK(database_entropy(labels({{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}})) == doctest::Approx(2.0).epsilon(1e-12));
  // -(0.75 log2 0.75 + 0.25 log2 0.25), evaluated independently
  const double expected = oracle::entropy({3, 1});
  CHECK(expected == doctest::Approx(0.8112781244591328).epsilon(1e-12));
  CHECK(std::abs(database_entropy(labels({{"a", 3}, {"b", 1}})) - expected) < 1e-12);
}

TEST_CASE("average entropy and gain on the four-instance example") {
  const auto d = parse_dataset("a,yes\na,no\nb,yes\nb,yes\n");
  CHECK(feature_average_entropy(d, 0) == doctest::Approx(0.5).epsilon(1e-12));
  // database entropy of counts (3,1) minus 0.5, not 1.0 - 0.5
  CHECK(information_gain(d, 0) == doctest::Approx(0.3112781244591328).epsilon(1e-12));
  CHECK(std::abs(information_gain(d, 0) - (oracle::entropy({3, 1}) - 0.5)) < 1e-12);
}

TEST_CASE("constant and predictive features") {
  const auto d = parse_dataset("p,k,yes\nq,k,no\nr,k,maybe\np,k,yes\n");
  const double h = database_entropy(d);
  CHECK(feature_average_entropy(d, 1) == h);
  CHECK(information_gain(d, 1) == 0.0);
  CHECK(feature_average_entropy(d, 0) == 0.0);
  CHECK(information_gain(d, 0) == h);
  const auto w = ig_weights(d);
  CHECK(w.gains == std::vector<double>{h, 0.0});
}

TEST_CASE("missing values form their own cell; numbers are treated as symbols") {
  const auto d = parse_dataset("#kinds:sym,num\n=,1,yes\n=,1,yes\nx,2,no\nx,2.5,no\n");
  CHECK(information_gain(d, 0) == database_entropy(d));
  CHECK(information_gain(d, 1) == database_entropy(d));
}

TEST_CASE("empty dataset and bad index") {
  const auto d = parse_dataset("a,yes\n");
  const auto empty = partition(d, 0, FeatureValue::symbol("zzz"));
  CHECK_THROWS_AS(database_entropy(empty), Error);
  CHECK_THROWS_AS(ig_weights(empty), Error);
  CHECK_THROWS_AS(information_gain(d, 1), Error);
}

TEST_CASE("normalized weights sum to one") {
  WeightVector w{{1.0, 3.0}};
  CHECK(w.normalized().gains == std::vector<double>{0.25, 0.75});
  WeightVector z{{0.0, 0.0}};
  CHECK(z.normalized() == z);
}

TEST_CASE("gain profile rows and rendering") {
  const auto d = parse_dataset("p,k,yes\nq,k,no\n");
  const auto profile = gain_profile(d);
  REQUIRE(profile.rows.size() == 2);
  CHECK(profile.rows[0].first == "f0");
  CHECK(profile.rows[1].first == "f1");
  CHECK(profile.rows[0].second == doctest::Approx(1.0));
  CHECK(profile.rows[1].second == 0.0);

  std::ostringstream out;
  render_gain_profile(profile, out, false, 10);
  CHECK(out.str() ==
        "database entropy: 1.0000 bits\n"
        "f0   |##########| 1.0000\n"
        "f1   |          | 0.0000\n");

  std::ostringstream norm;
  render_gain_profile(GainProfile{{{"a", 1.0}, {"b", 3.0}}, 1.0}, norm, true, 4);
  CHECK(norm.str() ==
        "database entropy: 1.0000 bits\n"
        "a    |#   | 0.2500\n"
        "b    |####| 0.7500\n");
}

TEST_CASE("property: entropy and gain match the brute-force oracle") {
  gen::Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto d = gen::random_dataset(rng);
    const double h = database_entropy(d);
    CHECK(std::abs(h - oracle::database_entropy(d)) < 1e-9);
    CHECK(h <= std::log2(static_cast<double>(d.categories().size())) + 1e-12);
    for (std::size_t f = 0; f < d.arity(); ++f) {
      CHECK(std::abs(feature_average_entropy(d, f) - oracle::average_entropy(d, f)) < 1e-9);
      const double g = information_gain(d, f);
      CHECK(std::abs(g - oracle::information_gain(d, f)) < 1e-9);
      CHECK(g >= 0.0);
      CHECK(g <= h + 1e-9);
    }
  }
}

TEST_CASE("property: gains are invariant to row order, value renaming and duplication") {
  gen::Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = gen::random_dataset(rng, {.allow_numeric = false, .allow_tag_sets = false});
    const auto base = ig_weights(d);

    auto rows = d.instances();
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto shuffled = ig_weights(Dataset::build(d.schema().kinds(), rows));

    auto renamed_rows = d.instances();
    for (auto& p : renamed_rows)
      for (auto& v : p.values)
        if (v.is_symbol()) v = FeatureValue::symbol("r_" + v.as_symbol());
    const auto renamed = ig_weights(Dataset::build(d.schema().kinds(), renamed_rows));

    std::vector<Pattern> doubled;
    for (int copy = 0; copy < 3; ++copy) doubled.insert(doubled.end(), d.instances().begin(), d.instances().end());
    const auto dup = ig_weights(Dataset::build(d.schema().kinds(), doubled));

    for (std::size_t f = 0; f < d.arity(); ++f) {
      CHECK(std::abs(shuffled[f] - base[f]) < 1e-12);
      CHECK(std::abs(renamed[f] - base[f]) < 1e-12);
      CHECK(std::abs(dup[f] - base[f]) < 1e-12);
    }
  }
}

TEST_CASE("equifrequent categories reach the entropy bound") {
  const auto d = labels({{"a", 3}, {"b", 3}, {"c", 3}});
  CHECK(database_entropy(d) == doctest::Approx(std::log2(3.0)).epsilon(1e-12));
  CHECK(database_entropy(labels({{"a", 4}, {"b", 3}, {"c", 3}})) < std::log2(3.0));
}
