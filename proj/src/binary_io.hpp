#pragma once

// Little-endian encoders/decoders shared by the FeatureFile and model
// containers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "illumkit/error.hpp"

namespace illumkit::binio {

class Writer {
 public:
  void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) { put_le(v, 2); }
  void u32(std::uint32_t v) { put_le(v, 4); }
  void f32(float v) { put_le(std::bit_cast<std::uint32_t>(v), 4); }
  void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v), 8); }

  // u16 length prefix + UTF-8 bytes.
  void short_string(std::string_view s, const char* what) {
    if (s.size() > 0xffff)
      throw InputError(std::string(what) + " longer than 65535 bytes");
    u16(static_cast<std::uint16_t>(s.size()));
    bytes(s);
  }

  const std::vector<char>& buffer() const { return buf_; }

 private:
  void put_le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>(v >> (8 * i)));
  }

  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint64_t offset() const { return pos_; }
  bool at_end() const { return pos_ == data_.size(); }

  std::string_view bytes(std::size_t n, const char* what) {
    need(n, what);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8(const char* what) {
    return static_cast<std::uint8_t>(get_le(1, what));
  }
  std::uint16_t u16(const char* what) {
    return static_cast<std::uint16_t>(get_le(2, what));
  }
  std::uint32_t u32(const char* what) {
    return static_cast<std::uint32_t>(get_le(4, what));
  }
  float f32(const char* what) {
    return std::bit_cast<float>(static_cast<std::uint32_t>(get_le(4, what)));
  }
  double f64(const char* what) {
    return std::bit_cast<double>(get_le(8, what));
  }
  std::string short_string(const char* what) {
    const auto n = u16(what);
    return std::string(bytes(n, what));
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (data_.size() - pos_ < n)
      throw FormatError(std::string("truncated ") + what, pos_);
  }
  std::uint64_t get_le(int n, const char* what) {
    need(static_cast<std::size_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
      v |= std::uint64_t(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace illumkit::binio
