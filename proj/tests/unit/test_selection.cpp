#include <doctest.h>

#include "cbstream/core/random.hpp"
#include "cbstream/select/mdi_forest.hpp"
#include "cbstream/select/selection.hpp"

using namespace cbstream;
using namespace cbstream::select;

namespace {

struct Dataset {
  std::vector<std::vector<double>> rows;
  std::vector<Label> labels;
};

// Column 0 decides the label; the others are noise.
Dataset planted(std::uint64_t seed, std::size_t n, std::size_t noise, bool duplicate = false) {
  Rng rng(seed);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r;
    const double f0 = rng.normal();
    r.push_back(f0);
    if (duplicate) r.push_back(f0);
    for (std::size_t k = 0; k < noise; ++k) r.push_back(rng.normal());
    d.rows.push_back(r);
    d.labels.push_back(f0 > 0 ? Label::present : Label::absent);
  }
  return d;
}

SelectionMask mask_of(std::vector<std::string> names) {
  SelectionMask m;
  m.active = std::move(names);
  m.version = 1;
  return m;
}

}  // namespace

TEST_SUITE("selection") {
  TEST_CASE("mdi ranks the planted feature first") {
    const auto d = planted(1, 400, 6);
    MdiForestParams p;
    p.seed = 3;
    p.n_trees = 30;
    const auto imp = mdi_importances(d.rows, d.labels, 7, p);
    REQUIRE(imp.size() == 7);
    for (std::size_t k = 1; k < 7; ++k) CHECK(imp[0] > imp[k]);
    double sum = 0;
    for (double v : imp) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0));
    CHECK(mdi_importances(d.rows, d.labels, 7, p) == imp);
  }

  TEST_CASE("mdi splits importance between duplicated features") {
    MdiForestParams p;
    p.seed = 5;
    p.n_trees = 40;
    const auto solo = mdi_importances(planted(2, 400, 4).rows, planted(2, 400, 4).labels, 5, p);
    const auto dup_data = planted(2, 400, 4, true);
    const auto dup = mdi_importances(dup_data.rows, dup_data.labels, 6, p);
    CHECK(dup[0] < solo[0]);
    CHECK(dup[1] < solo[0]);
    CHECK(dup[0] > 0.05);
    CHECK(dup[1] > 0.05);
  }

  TEST_CASE("mdi needs both classes") {
    const FeatureSpace space({"a", "b"});
    std::vector<FeatureVector> xs{{{"a", 1.0}}, {{"b", 2.0}}};
    CHECK_THROWS_WITH_AS(mdi_importances(space, xs, {Label::present, Label::present}),
                         "cold start requires both classes", std::invalid_argument);
    CHECK_THROWS_AS(mdi_importances(space, {}, {}), std::invalid_argument);
  }

  TEST_CASE("mdi named form reads absent features as zero") {
    const FeatureSpace space({"signal", "zero"});
    std::vector<FeatureVector> xs;
    std::vector<Label> ys;
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
      const double v = rng.uniform();
      xs.push_back({{"signal", v}});
      ys.push_back(v > 0.5 ? Label::present : Label::absent);
    }
    MdiForestParams p;
    p.n_trees = 10;
    const auto imp = mdi_importances(space, xs, ys, p);
    CHECK(imp.at("signal") == doctest::Approx(1.0));
    CHECK(imp.at("zero") == 0.0);
  }

  TEST_CASE("mean rule") {
    const auto uniform = select_from_importances({{"a", 0.25}, {"b", 0.25}, {"c", 0.25}, {"d", 0.25}});
    CHECK(uniform.active == std::vector<std::string>{"a", "b", "c", "d"});
    const auto one = select_from_importances({{"x", 0.7}, {"y", 0.2}, {"z", 0.1}});
    CHECK(one.active == std::vector<std::string>{"x"});
    CHECK(one.version == 1);
    CHECK(one.stage == SelectionStage::cold_start);
    CHECK(select_from_importances({{"a", 0.1}, {"b", 0.1}, {"c", 0.1}}).size() == 3);
    CHECK_THROWS_AS(select_from_importances({}), std::invalid_argument);
  }

  TEST_CASE("variance tracker: constant feature leaves and returns") {
    VarianceTracker t(mask_of({"a", "b"}));
    Rng rng(2);
    for (int i = 0; i < 500; ++i) t.update({{"a", rng.uniform()}, {"b", 0.0}});
    CHECK(t.mask().active == std::vector<std::string>{"a"});
    CHECK(t.mask().stage == SelectionStage::streaming);
    const auto v = t.mask().version;
    t.update({{"a", rng.uniform()}, {"b", 1.0}});
    CHECK(t.mask().active == std::vector<std::string>{"a", "b"});
    CHECK(t.mask().version == v + 1);
  }

  TEST_CASE("variance tracker: constant feature is masked within one step") {
    VarianceTracker t(mask_of({"a", "c"}));
    CHECK(t.update({{"a", 1.0}, {"c", 4.0}}).active.size() == 2);
    CHECK(t.update({{"a", 2.0}, {"c", 4.0}}).active == std::vector<std::string>{"a"});
  }

  TEST_CASE("variance tracker: stable membership keeps the version") {
    VarianceTracker t(mask_of({"a", "b"}));
    Rng rng(3);
    t.update({{"a", rng.uniform()}, {"b", rng.uniform()}});
    t.update({{"a", rng.uniform()}, {"b", rng.uniform()}});
    const auto v = t.mask().version;
    for (int i = 0; i < 100; ++i) t.update({{"a", rng.uniform()}, {"b", rng.uniform()}});
    CHECK(t.mask().version == v);
    CHECK(t.mask().size() == 2);
  }

  TEST_CASE("variance tracker: version increases exactly when membership changes") {
    VarianceTracker t(mask_of({"a", "b", "c"}));
    Rng rng(4);
    auto prev = t.mask();
    for (int i = 0; i < 400; ++i) {
      FeatureVector x;
      if (rng.bernoulli(0.02) || i > 200) x["a"] = rng.uniform();
      if (i % 100 == 50) x["b"] = 1.0;
      x["c"] = i < 300 ? 0.0 : rng.uniform();
      const auto& m = t.update(x);
      if (m.active != prev.active) {
        CHECK(m.version > prev.version);
      } else {
        CHECK(m.version == prev.version);
      }
      prev = m;
    }
  }

  TEST_CASE("variance tracker: all-constant stream keeps the cold-start set") {
    VarianceTracker t(mask_of({"a", "b"}));
    for (int i = 0; i < 10; ++i) t.update({});
    CHECK(t.mask().active == std::vector<std::string>{"a", "b"});
  }

  TEST_CASE("mask and tracker snapshots") {
    VarianceTracker t(mask_of({"a", "b"}));
    t.update({{"a", 1.0}});
    t.update({{"a", 2.0}});
    BinaryWriter w;
    t.save(w);
    BinaryReader r(w.bytes());
    auto u = VarianceTracker::load(r);
    CHECK(u.mask() == t.mask());
    CHECK(u.update({{"b", 3.0}}) == t.update({{"b", 3.0}}));
    CHECK(t.mask().contains("a"));
    CHECK_FALSE(t.mask().contains("zz"));
    const auto j = t.mask().to_json();
    CHECK(j["version"] == t.mask().version);
  }
}
