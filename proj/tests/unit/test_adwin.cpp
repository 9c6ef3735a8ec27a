#include <doctest.h>

#include <cmath>
#include <optional>

#include "cbstream/core/random.hpp"
#include "cbstream/learn/adwin.hpp"

using namespace cbstream;
using namespace cbstream::learn;

namespace {

// Unbucketed ADWIN: keeps every value and tests every cut point on the same
// clock as the bucketed detector.
class BruteAdwin {
 public:
  explicit BruteAdwin(double delta) : delta_(delta) {}
  bool update(double v) {
    window_.push_back(v);
    if (++tick_ % 32 != 0 || window_.size() <= 10) return false;
    bool changed = false;
    for (bool cut = true; cut;) {
      cut = false;
      const double n = static_cast<double>(window_.size());
      double total = 0, sq = 0;
      for (double x : window_) total += x;
      for (double x : window_) sq += (x - total / n) * (x - total / n);
      const double var = sq / n;
      double u0 = 0;
      for (std::size_t i = 0; i + 5 < window_.size(); ++i) {
        u0 += window_[i];
        const double n0 = static_cast<double>(i + 1), n1 = n - n0;
        if (n0 < 5) continue;
        const double m = 1.0 / (n0 - 4) + 1.0 / (n1 - 4);
        const double dd = std::log(2.0 * std::log(n) / delta_);
        const double eps = std::sqrt(2.0 * m * var * dd) + 2.0 / 3.0 * dd * m;
        if (std::abs(u0 / n0 - (total - u0) / n1) > eps) {
          window_.erase(window_.begin());
          cut = changed = true;
          break;
        }
      }
    }
    return changed;
  }

 private:
  double delta_;
  std::vector<double> window_;
  std::uint64_t tick_ = 0;
};

template <typename D>
std::optional<std::size_t> first_alarm(D& d, const std::vector<double>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (d.update(xs[i])) return i;
  return std::nullopt;
}

}  // namespace

TEST_SUITE("adwin") {
  TEST_CASE("constant stream never drifts") {
    Adwin a;
    for (int i = 0; i < 20000; ++i) CHECK_FALSE(a.update(0.3));
    CHECK(a.width() == 20000);
    CHECK(a.estimation() == doctest::Approx(0.3));
  }

  TEST_CASE("mean shift is detected like the unbucketed oracle") {
    std::vector<double> xs(5000, 0.0);
    xs.resize(10000, 1.0);
    Adwin a(0.002);
    BruteAdwin b(0.002);
    const auto ta = first_alarm(a, xs);
    const auto tb = first_alarm(b, xs);
    REQUIRE(ta.has_value());
    REQUIRE(tb.has_value());
    CHECK(*ta >= 5000);
    CHECK(*ta < 5200);
    CHECK(*tb >= 5000);
    CHECK(*tb < 5200);
    // Bucket granularity can only delay the cut, by at most one clock period.
    CHECK(*ta >= *tb);
    CHECK(*ta - *tb <= 32);
  }

  TEST_CASE("window shrinks after a cut") {
    Adwin a(0.002);
    for (int i = 0; i < 3000; ++i) a.update(0.0);
    for (int i = 0; i < 1000; ++i) a.update(1.0);
    CHECK(a.detections() >= 1);
    CHECK(a.width() < 2000);
    CHECK(a.estimation() > 0.6);
  }

  TEST_CASE("bucket variance matches direct computation") {
    Rng rng(4);
    Adwin a(1e-300);
    std::vector<double> xs;
    for (int i = 0; i < 3000; ++i) {
      xs.push_back(rng.uniform());
      a.update(xs.back());
    }
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    CHECK(a.width() == xs.size());
    CHECK(a.variance() == doctest::Approx(var).epsilon(1e-9));
    CHECK(a.bucket_count() < 80);
  }

  TEST_CASE("stationary bernoulli stays mostly quiet") {
    Rng rng(2002);
    Adwin a(0.002);
    int alarms = 0;
    for (int i = 0; i < 10000; ++i) alarms += a.update(rng.bernoulli(0.5) ? 1.0 : 0.0);
    CHECK(alarms <= 2);
  }

  TEST_CASE("snapshot round trip") {
    Rng rng(1);
    Adwin a(0.01);
    for (int i = 0; i < 1000; ++i) a.update(rng.uniform());
    BinaryWriter w;
    a.save(w);
    BinaryReader r(w.bytes());
    Adwin b = Adwin::load(r);
    for (int i = 0; i < 2000; ++i) {
      const double v = i < 1000 ? rng.uniform() : 2.0;
      CHECK(a.update(v) == b.update(v));
    }
    CHECK(a.width() == b.width());
    CHECK(a.estimation() == b.estimation());
  }
}
