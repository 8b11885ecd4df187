#pragma once

// Little-endian byte packing shared by the model and dataset containers.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace genet::detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void raw(std::string_view bytes) { buf_.append(bytes); }
  /// u32 length prefix followed by the bytes.
  void str(std::string_view s);

  [[nodiscard]] const std::string& bytes() const noexcept { return buf_; }
  [[nodiscard]] std::string take() && { return std::move(buf_); }

 private:
  std::string buf_;
};

/// Every read past the end throws FormatError naming `context`.
class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string context)
      : bytes_(bytes), context_(std::move(context)) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string_view raw(std::size_t n);
  std::string str();

  [[nodiscard]] std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  /// Throws FormatError unless every byte was consumed.
  void expect_end() const;

 private:
  void need(std::size_t n) const;

  std::string_view bytes_;
  std::size_t pos_ = 0;
  std::string context_;
};

/// Whole-file helpers; both throw IoError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

/// Converts a size to u32 or throws FormatError.
std::uint32_t checked_u32(std::size_t v, const char* what);

}  // namespace genet::detail
