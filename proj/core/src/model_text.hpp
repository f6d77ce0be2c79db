#pragma once

// Shared plumbing for the line-oriented, checksummed model files.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace helio::detail {

std::uint32_t crc32_of(std::string_view bytes);

class ModelWriter {
 public:
  ModelWriter(std::string_view magic, int version);
  void put(std::string_view key, std::string_view value);
  void put(std::string_view key, double value);
  void line(std::string_view text);
  /// Appends the crc32 line and returns the whole file.
  std::string finish() &&;

 private:
  std::string body_;
};

/// Validates magic, version and checksum up front, then hands out lines in order.
class ModelReader {
 public:
  ModelReader(std::string_view bytes, std::string_view magic, int version);

  bool done() const { return pos_ >= lines_.size(); }
  std::string_view next_line();
  /// Next line without consuming it; empty at end.
  std::string_view peek() const { return done() ? std::string_view{} : lines_[pos_]; }
  /// Next line must be `key=...`; returns the value.
  std::string_view expect(std::string_view key);
  double expect_double(std::string_view key);
  long long expect_int(std::string_view key);

 private:
  std::vector<std::string_view> lines_;
  std::size_t pos_ = 0;
};

std::vector<double> parse_numbers(std::string_view line);

}  // namespace helio::detail
