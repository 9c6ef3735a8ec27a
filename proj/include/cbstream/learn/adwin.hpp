#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

#include "cbstream/core/binary_io.hpp"

namespace cbstream::learn {

/// ADWIN change detector over a stream of reals (Bifet & Gavalda, exponential
/// histogram variant). Row i holds buckets summarizing 2^i values each, at most
/// `max_buckets` per row, so memory is O(log window).
class Adwin {
 public:
  static constexpr double kDefaultDelta = 0.002;

  explicit Adwin(double delta = kDefaultDelta, int clock = 32, int max_buckets = 5, int min_window = 5,
                 int grace_period = 10);

  /// Inserts `value`; true when the window was cut because its two halves
  /// have significantly different means. The older part is dropped.
  bool update(double value);

  double estimation() const { return width_ > 0 ? total_ / static_cast<double>(width_) : 0.0; }
  std::uint64_t width() const { return width_; }
  double total() const { return total_; }
  /// Population variance of the window.
  double variance() const { return width_ > 0 ? variance_ / static_cast<double>(width_) : 0.0; }
  double delta() const { return delta_; }
  std::uint64_t detections() const { return detections_; }
  std::size_t bucket_count() const;

  void save(BinaryWriter& out) const;
  static Adwin load(BinaryReader& in);

 private:
  struct Bucket {
    double total;
    double variance;
  };
  // rows_[i].front() is the newest bucket of size 2^i.
  using Row = std::deque<Bucket>;

  void insert(double value);
  void compress();
  bool detect_change();
  void drop_oldest();
  bool cut(double n0, double n1, double u0, double u1) const;

  double delta_;
  int clock_;
  int max_buckets_;
  int min_window_;
  int grace_period_;

  std::vector<Row> rows_;
  std::uint64_t width_ = 0;
  double total_ = 0.0;
  double variance_ = 0.0;  // sum of squared deviations
  std::uint64_t tick_ = 0;
  std::uint64_t detections_ = 0;
};

}  // namespace cbstream::learn
