#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cbstream/core/random.hpp"
#include "cbstream/learn/adaptive_random_forest.hpp"
#include "cbstream/learn/gaussian_nb.hpp"
#include "cbstream/learn/hoeffding_tree.hpp"

using namespace cbstream;
using namespace cbstream::learn;

namespace {

struct Sample {
  Instance x;
  Label y;
};

// Feature 0 decides the class; the rest is uniform noise.
std::vector<Sample> separable(std::uint64_t seed, std::size_t n, std::size_t n_features = 4) {
  Rng rng(seed);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(n_features);
    for (auto& e : v) e = rng.uniform();
    out.push_back({Instance(v), v[0] > 0.5 ? Label::present : Label::absent});
  }
  return out;
}

std::string bytes_of(const Classifier& c) {
  BinaryWriter w;
  c.save(w);
  return w.take();
}

bool valid(const ClassDistribution& d) {
  const auto& p = d.values();
  return p[0] >= 0 && p[0] <= 1 && p[1] >= 0 && p[1] <= 1 && std::abs(p[0] + p[1] - 1.0) < 1e-12;
}

}  // namespace

TEST_SUITE("learners") {
  TEST_CASE("gaussian nb: uniform before training") {
    GaussianNaiveBayes nb(2);
    const auto d = nb.predict_proba(Instance({1.0, 2.0}));
    CHECK(d[Label::absent] == 0.5);
    CHECK(d[Label::present] == 0.5);
  }

  TEST_CASE("gaussian nb: mirrored classes give 0.5 at the midpoint") {
    GaussianNaiveBayes nb(1);
    for (double v : {1.0, 2.0, 3.0}) nb.learn_one(Instance({v}), Label::absent);
    for (double v : {-1.0, -2.0, -3.0}) nb.learn_one(Instance({v}), Label::present);
    CHECK(nb.predict_proba(Instance({0.0}))[Label::absent] == doctest::Approx(0.5).epsilon(1e-9));
  }

  TEST_CASE("gaussian nb: separated clusters") {
    GaussianNaiveBayes nb(1);
    for (double v : {1.0, 2.0, 3.0}) nb.learn_one(Instance({v}), Label::absent);
    for (double v : {101.0, 102.0, 103.0}) nb.learn_one(Instance({v}), Label::present);
    CHECK(nb.predict_proba(Instance({2.0}))[Label::absent] > 0.999);
    CHECK(nb.stats(Label::absent, 0).mean == doctest::Approx(2.0));
    CHECK(nb.stats(Label::absent, 0).variance() == doctest::Approx(2.0 / 3.0));
  }

  TEST_CASE("gaussian nb: zero-variance feature stays finite") {
    GaussianNaiveBayes nb(1);
    for (int i = 0; i < 5; ++i) {
      nb.learn_one(Instance({1.0}), Label::absent);
      nb.learn_one(Instance({1.0}), Label::present);
    }
    CHECK(valid(nb.predict_proba(Instance({1.0}))));
    CHECK(valid(nb.predict_proba(Instance({1e6}))));
  }

  TEST_CASE("gaussian nb: inactive features are ignored") {
    GaussianNaiveBayes nb(2);
    for (double v : {1.0, 2.0, 3.0}) nb.learn_one(Instance({v, 0.0}), Label::absent);
    for (double v : {101.0, 102.0, 103.0}) nb.learn_one(Instance({v, 0.0}), Label::present);
    const Instance masked({2.0, 0.0}, {0, 1});
    CHECK(nb.predict_proba(masked)[Label::absent] == doctest::Approx(0.5));
  }

  TEST_CASE("hoeffding bound") {
    CHECK(hoeffding_bound(1.0, 0.05, 50) == doctest::Approx(0.17308).epsilon(1e-4));
    CHECK(hoeffding_bound(0.0, 0.05, 50) == 0.0);
    CHECK(hoeffding_bound(1.0, 0.05, 200) < hoeffding_bound(1.0, 0.05, 50));
  }

  TEST_CASE("hoeffding tree: empty tree predicts uniform") {
    HoeffdingTree t(3);
    CHECK(t.predict_proba(Instance({0.1, 0.2, 0.3}))[Label::present] == 0.5);
  }

  TEST_CASE("hoeffding tree: laplace smoothing") {
    HoeffdingTree t(1);
    for (int i = 0; i < 9; ++i) t.learn_one(Instance({0.0}), Label::present);
    t.learn_one(Instance({0.0}), Label::absent);
    const auto d = t.predict_proba(Instance({0.0}));
    CHECK(d[Label::present] == doctest::Approx(10.0 / 12.0));
    CHECK(d[Label::absent] == doctest::Approx(2.0 / 12.0));
  }

  TEST_CASE("hoeffding tree: splits on the separating feature") {
    for (bool adaptive : {false, true}) {
      HoeffdingTreeParams p;
      p.adaptive = adaptive;
      HoeffdingTree t(4, p);
      // The root threshold sits on a coarse candidate grid; children refine it.
      const auto train = separable(1, 5000);
      for (const auto& s : train) t.learn_one(s.x, s.y);
      REQUIRE(t.root_split_feature().has_value());
      CHECK(*t.root_split_feature() == 0u);
      std::size_t correct = 0;
      const auto test = separable(2, 1000);
      for (const auto& s : test) correct += t.predict_proba(s.x).argmax() == s.y;
      CHECK(static_cast<double>(correct) / test.size() >= 0.99);
    }
  }

  TEST_CASE("hoeffding tree: constant label never splits") {
    HoeffdingTree t(4);
    for (const auto& s : separable(3, 3000)) t.learn_one(s.x, Label::absent);
    CHECK(t.n_nodes() == 1);
    CHECK_FALSE(t.root_split_feature().has_value());
  }

  TEST_CASE("hoeffding tree: restricted feature subset") {
    HoeffdingTree t(4, {}, {1, 2});
    for (const auto& s : separable(4, 2000)) t.learn_one(s.x, s.y);
    if (auto f = t.root_split_feature()) CHECK((*f == 1u || *f == 2u));
  }

  TEST_CASE("hoeffding tree: depth limit") {
    HoeffdingTreeParams p;
    p.max_depth = 1;
    p.grace_period = 50;
    HoeffdingTree t(4, p);
    Rng rng(8);
    for (int i = 0; i < 5000; ++i) {
      std::vector<double> v(4);
      for (auto& e : v) e = rng.uniform();
      const bool y = (v[0] > 0.5) != (v[1] > 0.5);
      t.learn_one(Instance(v), y ? Label::present : Label::absent);
    }
    CHECK(t.depth() <= 1);
  }

  TEST_CASE("hoeffding tree: serialized size respects the limit") {
    HoeffdingTreeParams p;
    p.max_size_mb = 0.004;
    p.grace_period = 20;
    p.tie_threshold = 0.5;
    HoeffdingTree t(6, p);
    Rng rng(12);
    for (int i = 0; i < 20000; ++i) {
      std::vector<double> v(6);
      for (auto& e : v) e = rng.uniform();
      const double s = std::sin(7 * v[0]) + std::cos(5 * v[1]) + v[2] * v[3];
      t.learn_one(Instance(v), s > 0.6 ? Label::present : Label::absent);
      if (i % 500 == 0) {
        CHECK(t.serialized_size() <= t.size_limit_bytes());
        CHECK(t.serialized_size() == bytes_of(t).size());
      }
    }
    CHECK(t.serialized_size() <= t.size_limit_bytes());
    CHECK(t.n_active_leaves() <= t.n_leaves());
  }

  TEST_CASE("hoeffding tree: snapshot round trip and determinism") {
    HoeffdingTree a(4), b(4);
    const auto s = separable(5, 1500);
    for (std::size_t i = 0; i < 1000; ++i) {
      a.learn_one(s[i].x, s[i].y);
      b.learn_one(s[i].x, s[i].y);
    }
    CHECK(bytes_of(a) == bytes_of(b));
    const auto bytes = bytes_of(a);
    BinaryReader r(bytes);
    auto restored = load_classifier(r);
    CHECK(restored->kind() == "hatc");
    for (std::size_t i = 1000; i < 1500; ++i) {
      CHECK(restored->predict_proba(s[i].x).values() == a.predict_proba(s[i].x).values());
      restored->learn_one(s[i].x, s[i].y);
      a.learn_one(s[i].x, s[i].y);
    }
    CHECK(bytes_of(*restored) == bytes_of(a));
  }

  TEST_CASE("hoeffding tree: adaptive tree grows alternates after a flip") {
    HoeffdingTreeParams p;
    p.grace_period = 100;
    HoeffdingTree t(4, p);
    auto s = separable(6, 8000);
    std::size_t max_alternates = 0;
    std::size_t correct_late = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      Label y = s[i].y;
      if (i >= 3000) y = y == Label::present ? Label::absent : Label::present;
      if (i >= 7000) correct_late += t.predict_proba(s[i].x).argmax() == y;
      t.learn_one(s[i].x, y);
      max_alternates = std::max(max_alternates, t.n_alternate_trees());
    }
    CHECK(max_alternates >= 1);
    CHECK(correct_late >= 900);
  }

  TEST_CASE("predictions are valid distributions") {
    Rng rng(77);
    HoeffdingTree ht(3);
    ArfParams ap;
    ap.n_models = 5;
    ap.max_features = FeatureBudget::sqrt();
    AdaptiveRandomForest arf(3, ap, 1);
    GaussianNaiveBayes nb(3);
    for (int i = 0; i < 3000; ++i) {
      std::vector<double> v{rng.normal(), rng.uniform() * 100, rng.bernoulli(0.3) ? 1.0 : 0.0};
      const Instance x(v);
      const Label y = rng.bernoulli(0.5) ? Label::present : Label::absent;
      for (Classifier* c : std::initializer_list<Classifier*>{&ht, &arf, &nb}) {
        CHECK(valid(c->predict_proba(x)));
        c->learn_one(x, y);
      }
    }
  }

  TEST_CASE("feature budget") {
    CHECK(FeatureBudget::sqrt().resolve(25) == 5);
    CHECK(FeatureBudget::count(25).resolve(10) == 10);
    CHECK(FeatureBudget::count(0).resolve(10) == 1);
    CHECK(FeatureBudget::all().resolve(7) == 7);
  }

  TEST_CASE("arf with one deterministic member equals a single tree") {
    ArfParams p;
    p.n_models = 1;
    p.bootstrap = false;
    p.detectors = false;
    p.max_features = FeatureBudget::all();
    AdaptiveRandomForest arf(4, p, 99);
    HoeffdingTree tree(4, p.tree, {0, 1, 2, 3});
    for (const auto& s : separable(7, 2000)) {
      CHECK(arf.predict_proba(s.x).values() == tree.predict_proba(s.x).values());
      arf.learn_one(s.x, s.y);
      tree.learn_one(s.x, s.y);
    }
    CHECK(bytes_of(arf.member(0)) == bytes_of(tree));
  }

  TEST_CASE("arf soft vote is the mean of members") {
    ArfParams p;
    p.n_models = 6;
    p.max_features = FeatureBudget::count(2);
    AdaptiveRandomForest arf(4, p, 3);
    const auto s = separable(8, 1500);
    for (const auto& e : s) arf.learn_one(e.x, e.y);
    for (std::size_t i = 0; i < 50; ++i) {
      double present = 0;
      for (std::size_t m = 0; m < arf.n_members(); ++m) present += arf.member(m).predict_proba(s[i].x)[Label::present];
      CHECK(arf.predict_proba(s[i].x)[Label::present] == doctest::Approx(present / 6.0).epsilon(1e-12));
    }
    for (std::size_t m = 0; m < arf.n_members(); ++m) {
      const auto& f = arf.member(m).features();
      CHECK(f.size() == 2);
      CHECK(std::is_sorted(f.begin(), f.end()));
    }
  }

  TEST_CASE("arf learns a separable stream") {
    ArfParams p;
    p.n_models = 10;
    p.max_features = FeatureBudget::sqrt();
    AdaptiveRandomForest arf(4, p, 4);
    const auto s = separable(9, 3000);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i >= 2000) correct += arf.predict_proba(s[i].x).argmax() == s[i].y;
      arf.learn_one(s[i].x, s[i].y);
    }
    CHECK(static_cast<double>(correct) / 1000.0 >= 0.95);
  }

  TEST_CASE("poisson(25) weights") {
    Rng rng(25);
    double sum = 0;
    for (int i = 0; i < 10000; ++i) sum += rng.poisson(25.0);
    CHECK(std::abs(sum / 10000.0 - 25.0) <= 0.5);
  }

  TEST_CASE("arf snapshot round trip") {
    ArfParams p;
    p.n_models = 4;
    AdaptiveRandomForest a(4, p, 11);
    const auto s = separable(10, 1200);
    for (std::size_t i = 0; i < 800; ++i) a.learn_one(s[i].x, s[i].y);
    const auto bytes = bytes_of(a);
    BinaryReader r(bytes);
    auto b = load_classifier(r);
    CHECK(b->kind() == "arfc");
    for (std::size_t i = 800; i < 1200; ++i) {
      CHECK(b->predict_proba(s[i].x).values() == a.predict_proba(s[i].x).values());
      a.learn_one(s[i].x, s[i].y);
      b->learn_one(s[i].x, s[i].y);
    }
    CHECK(bytes_of(*b) == bytes_of(a));
    GaussianNaiveBayes nb(4);
    nb.learn_one(s[0].x, s[0].y);
    const auto nb_bytes = bytes_of(nb);
    BinaryReader nr(nb_bytes);
    CHECK(load_classifier(nr)->kind() == "gnb");
  }
}
