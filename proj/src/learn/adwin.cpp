#include "cbstream/learn/adwin.hpp"

#include <cmath>

namespace cbstream::learn {

Adwin::Adwin(double delta, int clock, int max_buckets, int min_window, int grace_period)
    : delta_(delta), clock_(clock), max_buckets_(max_buckets), min_window_(min_window), grace_period_(grace_period) {}

std::size_t Adwin::bucket_count() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

bool Adwin::update(double value) {
  insert(value);
  compress();
  ++tick_;
  if (tick_ % static_cast<std::uint64_t>(clock_) != 0 || width_ <= static_cast<std::uint64_t>(grace_period_))
    return false;
  const bool change = detect_change();
  if (change) ++detections_;
  return change;
}

void Adwin::insert(double value) {
  if (rows_.empty()) rows_.emplace_back();
  rows_[0].push_front({value, 0.0});
  ++width_;
  if (width_ > 1) {
    const double mean_before = total_ / static_cast<double>(width_ - 1);
    const double d = value - mean_before;
    variance_ += static_cast<double>(width_ - 1) * d * d / static_cast<double>(width_);
  }
  total_ += value;
}

void Adwin::compress() {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].size() <= static_cast<std::size_t>(max_buckets_)) break;
    if (i + 1 == rows_.size()) rows_.emplace_back();
    // The two oldest buckets of row i merge into the newest slot of row i+1.
    const Bucket b1 = rows_[i].back();
    rows_[i].pop_back();
    const Bucket b2 = rows_[i].back();
    rows_[i].pop_back();
    const double n = std::ldexp(1.0, static_cast<int>(i));
    const double d = b1.total / n - b2.total / n;
    rows_[i + 1].push_front({b1.total + b2.total, b1.variance + b2.variance + n * d * d / 2.0});
  }
}

bool Adwin::cut(double n0, double n1, double u0, double u1) const {
  const double n = static_cast<double>(width_);
  const double diff = u0 / n0 - u1 / n1;
  const double m = 1.0 / (n0 - min_window_ + 1) + 1.0 / (n1 - min_window_ + 1);
  const double dd = std::log(2.0 * std::log(n) / delta_);
  const double eps = std::sqrt(2.0 * m * variance() * dd) + 2.0 / 3.0 * dd * m;
  return std::fabs(diff) > eps;
}

bool Adwin::detect_change() {
  bool changed = false;
  bool reduce = true;
  while (reduce && width_ > 0) {
    reduce = false;
    double n0 = 0, u0 = 0;
    double n1 = static_cast<double>(width_), u1 = total_;
    // Oldest bucket first; n0/u0 accumulate the older sub-window.
    for (std::size_t r = rows_.size(); r-- > 0 && !reduce;) {
      const double size = std::ldexp(1.0, static_cast<int>(r));
      for (auto it = rows_[r].rbegin(); it != rows_[r].rend(); ++it) {
        n0 += size;
        n1 -= size;
        u0 += it->total;
        u1 -= it->total;
        if (n1 < min_window_) break;
        if (n0 >= min_window_ && cut(n0, n1, u0, u1)) {
          reduce = true;
          changed = true;
          drop_oldest();
          break;
        }
      }
    }
  }
  return changed;
}

void Adwin::drop_oldest() {
  for (std::size_t r = rows_.size(); r-- > 0;) {
    if (rows_[r].empty()) continue;
    const Bucket b = rows_[r].back();
    rows_[r].pop_back();
    const double n = std::ldexp(1.0, static_cast<int>(r));
    const double w = static_cast<double>(width_);
    width_ -= static_cast<std::uint64_t>(n);
    total_ -= b.total;
    const double rest = static_cast<double>(width_);
    if (rest > 0) {
      const double d = b.total / n - total_ / rest;
      variance_ -= b.variance + n * rest / w * d * d;
      if (variance_ < 0) variance_ = 0;
    } else {
      variance_ = 0;
      total_ = 0;
    }
    while (!rows_.empty() && rows_.back().empty()) rows_.pop_back();
    return;
  }
}

void Adwin::save(BinaryWriter& out) const {
  out.f64(delta_);
  out.u32(static_cast<std::uint32_t>(clock_));
  out.u32(static_cast<std::uint32_t>(max_buckets_));
  out.u32(static_cast<std::uint32_t>(min_window_));
  out.u32(static_cast<std::uint32_t>(grace_period_));
  out.u64(width_);
  out.f64(total_);
  out.f64(variance_);
  out.u64(tick_);
  out.u64(detections_);
  out.u32(static_cast<std::uint32_t>(rows_.size()));
  for (const auto& row : rows_) {
    out.u32(static_cast<std::uint32_t>(row.size()));
    for (const auto& b : row) {
      out.f64(b.total);
      out.f64(b.variance);
    }
  }
}

Adwin Adwin::load(BinaryReader& in) {
  const double delta = in.f64();
  const int clock = static_cast<int>(in.u32());
  const int max_buckets = static_cast<int>(in.u32());
  const int min_window = static_cast<int>(in.u32());
  const int grace = static_cast<int>(in.u32());
  Adwin a(delta, clock, max_buckets, min_window, grace);
  a.width_ = in.u64();
  a.total_ = in.f64();
  a.variance_ = in.f64();
  a.tick_ = in.u64();
  a.detections_ = in.u64();
  a.rows_.resize(in.u32());
  for (auto& row : a.rows_) {
    const auto n = in.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
      const double t = in.f64();
      const double v = in.f64();
      row.push_back({t, v});
    }
  }
  return a;
}

}  // namespace cbstream::learn
