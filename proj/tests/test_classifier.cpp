#include <doctest.h>

#include <thread>

#include "generators.hpp"
#include "mbl/classifier.hpp"
#include "oracles.hpp"

using namespace mbl;

namespace {

FeatureValue sym(const char* s) { return FeatureValue::symbol(s); }

Pattern pat(std::initializer_list<const char*> values) {
  Pattern p;
  for (const char* v : values) p.values.push_back(sym(v));
  return p;
}

const std::vector<std::vector<Metric>> kConfigs = {
    {}, {Metric::Overlap}, {Metric::ValueDifference}, {Metric::TagSet}};

}  // namespace

TEST_CASE("numeric delta") {
  CHECK(delta_numeric(5.0, 3.0, 0.0, 10.0) == doctest::Approx(0.2));
  CHECK(delta_numeric(7.0, 7.0, 0.0, 10.0) == 0.0);
  CHECK(delta_numeric(0.0, 10.0, 0.0, 10.0) == 1.0);
  // degenerate range: exact-match overlap
  CHECK(delta_numeric(2.0, 2.0, 2.0, 2.0) == 0.0);
  CHECK(delta_numeric(2.0, 3.0, 2.0, 2.0) == 1.0);
  // outside the training range: clamped
  CHECK(delta_numeric(-50.0, 10.0, 0.0, 10.0) == 1.0);
  CHECK(delta_numeric(FeatureValue::missing(), FeatureValue::missing(), 0, 1) == 0.0);
  CHECK(delta_numeric(FeatureValue::missing(), FeatureValue::number(1), 0, 1) == 1.0);
}

TEST_CASE("overlap delta") {
  CHECK(delta_overlap(sym("a"), sym("a")) == 0.0);
  CHECK(delta_overlap(sym("a"), sym("b")) == 1.0);
  CHECK(delta_overlap(FeatureValue::missing(), sym("a")) == 1.0);
  CHECK(delta_overlap(FeatureValue::missing(), FeatureValue::missing()) == 0.0);
}

TEST_CASE("tag-set delta") {
  const auto nv = FeatureValue::tags(TagSet{"noun", "verb"});
  const auto n = FeatureValue::tags(TagSet{"noun"});
  const auto v = FeatureValue::tags(TagSet{"verb"});
  CHECK(delta_tagset(nv, nv) == 0.0);
  CHECK(delta_tagset(n, v) == 1.0);
  CHECK(delta_tagset(nv, n) == 0.5);
  CHECK(delta_tagset(nv, sym("noun")) == 0.5);  // symbol promoted to a singleton
  CHECK(delta_tagset(FeatureValue::tags(TagSet{"a", "b", "c"}), FeatureValue::tags(TagSet{"b", "c", "d"})) ==
        doctest::Approx(0.5));
  CHECK(delta_tagset(FeatureValue::missing(), n) == 1.0);
}

TEST_CASE("value-difference delta") {
  // f0: x -> {yes:2, no:1}, y -> {yes:0, no:2}, z -> {yes:1, no:0}
  const auto d = parse_dataset("x,yes\nx,yes\nx,no\ny,no\ny,no\nz,yes\n");
  const auto base = train(d, {.ig_weighting = false, .metrics = {Metric::ValueDifference}});
  CHECK(delta_vdm(0, sym("x"), sym("x"), base) == 0.0);
  CHECK(delta_vdm(0, sym("y"), sym("z"), base) == 2.0);
  // categories sorted (no, yes): |1/3 - 1| + |2/3 - 0| = 4/3
  CHECK(delta_vdm(0, sym("x"), sym("y"), base) == doctest::Approx(4.0 / 3.0));
  CHECK(delta_vdm(0, sym("x"), sym("y"), base) == delta_vdm(0, sym("y"), sym("x"), base));
  // |1/3 - 0| + |2/3 - 1| = 2/3
  CHECK(delta_vdm(0, sym("x"), sym("z"), base) == doctest::Approx(2.0 / 3.0));
  // unseen value falls back to overlap
  CHECK(delta_vdm(0, sym("x"), sym("unseen"), base) == 1.0);
  CHECK(delta_vdm(0, sym("q"), sym("q"), base) == 0.0);
  CHECK(base.vdm_tables()[0].values.size() == 3);
}

TEST_CASE("weighted distance") {
  const auto d = parse_dataset("a,b,c1\nd,e,c2\n");
  const auto base = train(d, {.ig_weighting = false}).with_weights(WeightVector{{0.5, 0.0}});
  CHECK(base.distance(pat({"a", "b"}), pat({"a", "b"})) == 0.0);
  CHECK(base.distance(pat({"a", "b"}), pat({"x", "y"})) == 0.5);
  CHECK_THROWS_AS(base.distance(pat({"a"}), pat({"a", "b"})), Error);
}

TEST_CASE("unweighted distance counts mismatches") {
  const auto d = parse_dataset("a,b,c,x\n");
  const auto base = train(d, {.ig_weighting = false});
  CHECK(base.distance(pat({"a", "b", "c"}), pat({"a", "q", "r"})) == 2.0);
}

TEST_CASE("classify exact match and tie rules") {
  const auto d = parse_dataset("a,b,c1\nd,e,c2\n");
  const auto base = train(d, {.ig_weighting = false});
  const auto hit = classify(base, pat({"d", "e"}));
  CHECK(hit.category == "c2");
  CHECK(hit.distance == 0.0);
  CHECK(hit.neighbour_index == 1);
  CHECK(hit.tie_count == 1);

  // both instances at distance 1; equal frequency, lower index wins
  const auto tie = classify(base, pat({"a", "e"}));
  CHECK(tie.category == "c1");
  CHECK(tie.distance == 1.0);
  CHECK(tie.tie_count == 2);
  CHECK(tie.neighbour_index == 0);
}

TEST_CASE("tie goes to the most frequent category among co-minimal instances") {
  const auto d = parse_dataset("a,x,c1\nb,x,c2\nc,x,c2\n");
  const auto base = train(d, {.ig_weighting = false});
  const auto r = classify(base, pat({"z", "x"}));
  CHECK(r.category == "c2");
  CHECK(r.tie_count == 3);
  CHECK(r.neighbour_index == 1);
}

TEST_CASE("k nearest neighbours vote") {
  const auto d = parse_dataset("a,a,c1\na,b,c2\na,c,c2\nz,z,c3\n");
  const auto base = train(d, {.ig_weighting = false});
  const auto q = pat({"a", "a"});
  CHECK(classify(base, q, 1).category == "c1");
  const auto r = classify(base, q, 3);
  CHECK(r.category == "c2");
  CHECK(r.distance == 1.0);
  CHECK(r.neighbour_index == 1);
  CHECK(r.tie_count == 1);
  // k larger than the base is clamped
  CHECK(classify(base, q, 100).category == "c2");
  CHECK_THROWS_AS(classify(base, q, 0), Error);
}

TEST_CASE("unknown query values are counted") {
  const auto d = parse_dataset("a,b,c1\nd,e,c2\n");
  const auto base = train(d);
  const auto r = classify(base, pat({"q", "e"}));
  CHECK(r.unknown_values == 1);
  CHECK(r.category == "c2");
}

TEST_CASE("numeric features, missing values and out-of-range queries") {
  const auto d = parse_dataset("#kinds:num,sym\n0,a,lo\n10,a,hi\n=,b,none\n");
  const auto base = train(d, {.ig_weighting = false});
  Pattern q{{FeatureValue::number(2.0), sym("a")}, {}};
  CHECK(classify(base, q).category == "lo");
  Pattern far{{FeatureValue::number(500.0), sym("a")}, {}};
  // clamped to 1 against both numeric instances: a tie resolved by index
  CHECK(classify(base, far).category == "lo");
  CHECK(classify(base, far).distance == 1.0);
  CHECK(classify(base, far).tie_count == 2);
  Pattern miss{{FeatureValue::missing(), sym("b")}, {}};
  CHECK(classify(base, miss).category == "none");
  CHECK(classify(base, miss).distance == 0.0);
  Pattern wrong{{sym("x"), sym("a")}, {}};
  CHECK_THROWS_AS(classify(base, wrong), Error);
}

TEST_CASE("metric configuration") {
  const auto d = parse_dataset("#kinds:num,sym,tag\n1,a,x|y,c\n");
  CHECK(resolve_metrics(d.schema(), {}) == std::vector{Metric::Numeric, Metric::Overlap, Metric::TagSet});
  CHECK(resolve_metrics(d.schema(), {Metric::ValueDifference}) ==
        std::vector{Metric::Numeric, Metric::ValueDifference, Metric::ValueDifference});
  CHECK(resolve_metrics(d.schema(), {Metric::Overlap, Metric::TagSet, Metric::Overlap}) ==
        std::vector{Metric::Overlap, Metric::TagSet, Metric::Overlap});
  CHECK_THROWS_AS(resolve_metrics(d.schema(), {Metric::Overlap, Metric::Overlap}), Error);
  CHECK_THROWS_AS(resolve_metrics(d.schema(), {Metric::TagSet, Metric::Overlap, Metric::Overlap}), Error);
  CHECK_THROWS_AS(resolve_metrics(d.schema(), {Metric::Overlap, Metric::Numeric, Metric::Overlap}), Error);
  CHECK(parse_metric("vdm") == Metric::ValueDifference);
  CHECK_THROWS_AS(parse_metric("euclid"), Error);
}

TEST_CASE("training stores every instance and honours the weighting switch") {
  const auto d = parse_dataset("a,k,yes\nb,k,no\nc,k,no\n");
  const auto ig = train(d);
  CHECK(ig.size() == 3);
  CHECK(ig.dataset() == d);
  CHECK(ig.weights()[1] == 0.0);
  CHECK(ig.weights()[0] > 0.0);
  const auto plain = train(d, {.ig_weighting = false});
  CHECK(plain.weights().gains == std::vector<double>{1.0, 1.0});
  CHECK_THROWS_AS(train(partition(d, 0, sym("none"))), Error);
}

TEST_CASE("property: classification matches the exhaustive-scan oracle") {
  gen::Rng rng(31);
  for (int trial = 0; trial < 150; ++trial) {
    const auto d = gen::random_dataset(rng, {.max_instances = 120});
    for (const auto& metrics : kConfigs) {
      for (const bool ig : {true, false}) {
        const auto base = train(d, {.ig_weighting = ig, .metrics = metrics});
        std::vector<double> weights(d.arity(), 1.0);
        if (ig)
          for (std::size_t f = 0; f < d.arity(); ++f) weights[f] = base.weights()[f];
        const oracle::NearestNeighbour nn(d, base.metrics(), weights);
        for (int q = 0; q < 10; ++q) {
          const auto query = gen::random_query(rng, d);
          std::size_t index = 0, ties = 0;
          const auto expected = nn.classify(query, &index, &ties);
          const auto got = classify(base, query);
          CHECK(got.category == expected);
          CHECK(got.neighbour_index == index);
          CHECK(got.tie_count == ties);
          CHECK(got.distance == nn.distance(query, d[index]));
        }
      }
    }
  }
}

TEST_CASE("property: distance axioms and zero-gain features") {
  gen::Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = gen::random_dataset(rng);
    for (const auto& metrics : kConfigs) {
      const auto base = train(d, {.metrics = metrics});
      for (int q = 0; q < 10; ++q) {
        const auto x = gen::random_query(rng, d);
        const auto y = gen::random_query(rng, d);
        CHECK(base.distance(x, x) == 0.0);
        CHECK(base.distance(x, y) == base.distance(y, x));
        CHECK(base.distance(x, y) >= 0.0);

        const auto before = classify(base, x);
        for (std::size_t f = 0; f < d.arity(); ++f) {
          if (base.weights()[f] != 0.0) continue;
          auto perturbed = x;
          perturbed.values[f] = gen::random_value(rng, d.schema()[f].kind, 5, 0.2);
          CHECK(classify(base, perturbed).category == before.category);
        }
      }
    }
  }
}

TEST_CASE("property: value-difference metric obeys the triangle inequality") {
  gen::Rng rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = gen::random_dataset(rng, {.max_instances = 40, .max_features = 2, .max_alphabet = 5,
                                             .allow_numeric = false, .allow_tag_sets = false, .missing_rate = 0});
    const auto base = train(d, {.ig_weighting = false, .metrics = {Metric::ValueDifference}});
    for (std::size_t f = 0; f < d.arity(); ++f) {
      const auto& values = d.schema()[f].value_set;
      for (const auto& a : values)
        for (const auto& b : values)
          for (const auto& c : values)
            CHECK(base.delta_vdm(f, a, c) <= base.delta_vdm(f, a, b) + base.delta_vdm(f, b, c) + 1e-12);
    }
  }
}

TEST_CASE("property: leave-one-out recovers consistent exact duplicates") {
  gen::Rng rng(34);
  for (int trial = 0; trial < 30; ++trial) {
    // label is a function of the feature vector, so duplicates always agree
    std::vector<Pattern> rows;
    for (int i = 0; i < 60; ++i) {
      Pattern p = pat({});
      std::string key;
      for (int f = 0; f < 3; ++f) {
        const char c = static_cast<char>('a' + gen::uniform(rng, 0, 2));
        p.values.push_back(FeatureValue::symbol(std::string(1, c)));
        key += c;
      }
      p.category = "c" + std::to_string(std::hash<std::string>{}(key) % 3);
      rows.push_back(p);
    }
    const auto d = Dataset::build(std::vector(3, FeatureKind::Symbolic), rows);
    for (std::size_t held = 0; held < rows.size(); ++held) {
      auto rest = rows;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(held));
      const bool has_duplicate = std::any_of(rest.begin(), rest.end(),
                                             [&](const Pattern& p) { return p.values == rows[held].values; });
      if (!has_duplicate) continue;
      const auto base = train(Dataset::build(std::vector(3, FeatureKind::Symbolic), rest));
      CHECK(classify(base, rows[held]).category == *rows[held].category);
    }
  }
}

TEST_CASE("concurrent classification matches sequential results") {
  gen::Rng rng(35);
  const auto d = gen::random_dataset(rng, {.max_instances = 200, .max_features = 6});
  const auto base = train(d, {.metrics = {Metric::ValueDifference}});
  std::vector<Pattern> queries;
  for (int i = 0; i < 200; ++i) queries.push_back(gen::random_query(rng, d));
  std::vector<std::string> sequential;
  for (const auto& q : queries) sequential.push_back(classify(base, q).category);

  std::vector<std::vector<std::string>> parallel(4);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < parallel.size(); ++t)
    threads.emplace_back([&, t] {
      for (const auto& q : queries) parallel[t].push_back(classify(base, q).category);
    });
  for (auto& t : threads) t.join();
  for (const auto& r : parallel) CHECK(r == sequential);
}
