#pragma once

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtypology/error.hpp"

namespace qtypology {

// Little-endian byte buffer writer for the binary artifact containers.
class ByteWriter {
 public:
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void i64(std::int64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void bytes(std::string_view s) {
    u64(s.size());
    buf_.append(s);
  }
  void tag(const char (&t)[5]) { buf_.append(t, 4); }
  void matrix(const Eigen::MatrixXd& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) f64(m(i, j));
  }
  void vector(const Eigen::VectorXd& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
  }
  void strings(const std::vector<std::string>& v) {
    u64(v.size());
    for (const auto& s : v) bytes(s);
  }
  const std::string& str() const { return buf_; }

 private:
  void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  std::string buf_;
};

// Bounds-checked reader; any overrun is reported as corruption.
class ByteReader {
 public:
  explicit ByteReader(std::string_view data, std::string what = "artifact") : d_(data), what_(std::move(what)) {}

  std::uint32_t u32() { return pod<std::uint32_t>(); }
  std::uint64_t u64() { return pod<std::uint64_t>(); }
  std::int64_t i64() { return pod<std::int64_t>(); }
  double f64() { return pod<double>(); }
  std::string bytes() {
    const auto n = count(1);
    std::string s(d_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string tag() {
    need(4);
    std::string t(d_.substr(pos_, 4));
    pos_ += 4;
    return t;
  }
  void expect_tag(std::string_view t) {
    if (tag() != t) throw Error(ErrorKind::kCorrupt, what_ + ": expected section " + std::string(t));
  }
  Eigen::MatrixXd matrix() {
    const auto r = u64();
    const auto c = u64();
    if (c != 0 && r > remaining() / 8 / c) corrupt();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = f64();
    return m;
  }
  Eigen::VectorXd vector() {
    const auto n = count(8);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = f64();
    return v;
  }
  std::vector<std::string> strings() {
    const auto n = count(8);
    std::vector<std::string> v;
    v.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) v.push_back(bytes());
    return v;
  }
  // Element count with a plausibility check against the bytes left.
  std::uint64_t count(std::size_t min_elem_bytes) {
    const auto n = u64();
    if (n > remaining() / min_elem_bytes) corrupt();
    return n;
  }
  std::size_t remaining() const { return d_.size() - pos_; }
  bool at_end() const { return pos_ == d_.size(); }

 private:
  template <class T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, d_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void need(std::size_t n) const {
    if (remaining() < n) corrupt();
  }
  [[noreturn]] void corrupt() const { throw Error(ErrorKind::kCorrupt, what_ + " is truncated or corrupt"); }

  std::string_view d_;
  std::size_t pos_ = 0;
  std::string what_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingArtifact, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

inline constexpr std::string_view kMatrixMagic = "QTMATRX1";

// Dense matrix file: magic, rows, cols, row-major doubles.
inline std::string encode_matrix(const Eigen::MatrixXd& m) {
  ByteWriter w;
  std::string out(kMatrixMagic);
  w.matrix(m);
  return out + w.str();
}

inline Eigen::MatrixXd decode_matrix(std::string_view data, const std::string& what = "matrix") {
  if (data.substr(0, kMatrixMagic.size()) != kMatrixMagic) throw Error(ErrorKind::kCorrupt, what + ": bad magic");
  ByteReader r(data.substr(kMatrixMagic.size()), what);
  auto m = r.matrix();
  if (!r.at_end()) throw Error(ErrorKind::kCorrupt, what + ": trailing bytes");
  return m;
}

// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace qtypology
