#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cbstream {

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Little-endian byte sink for model snapshots. In counting mode nothing is
/// stored, only the would-be size, which lets models measure themselves.
class BinaryWriter {
 public:
  static BinaryWriter counting() {
    BinaryWriter w;
    w.counting_ = true;
    return w;
  }

  void u8(std::uint8_t v) { raw(&v, 1); }
  void u32(std::uint32_t v) { le(v); }
  void u64(std::uint64_t v) { le(v); }
  void i64(std::int64_t v) { le(static_cast<std::uint64_t>(v)); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  void boolean(bool v) { u8(v ? 1 : 0); }
  void str(std::string_view s) {
    u64(s.size());
    raw(s.data(), s.size());
  }

  std::size_t size() const { return size_; }
  const std::string& bytes() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  template <typename T>
  void le(T v) {
    unsigned char b[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    raw(b, sizeof(T));
  }
  void raw(const void* p, std::size_t n) {
    size_ += n;
    if (!counting_) buf_.append(static_cast<const char*>(p), n);
  }

  std::string buf_;
  std::size_t size_ = 0;
  bool counting_ = false;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::string_view bytes) : data_(bytes) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() { return le<std::uint32_t>(); }
  std::uint64_t u64() { return le<std::uint64_t>(); }
  std::int64_t i64() { return static_cast<std::int64_t>(le<std::uint64_t>()); }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  bool boolean() { return u8() != 0; }
  std::string str() {
    const auto n = u64();
    if (n > remaining()) throw SnapshotError("snapshot truncated (string)");
    return std::string(take(n));
  }

  void expect(std::string_view magic) {
    if (take(magic.size()) != magic) throw SnapshotError("snapshot section mismatch: expected " + std::string(magic));
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }

 private:
  template <typename T>
  T le() {
    const auto b = take(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  std::string_view take(std::size_t n) {
    if (n > remaining()) throw SnapshotError("snapshot truncated");
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace cbstream
