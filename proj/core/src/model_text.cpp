#include "model_text.hpp"

#include <cstdio>
#include <zlib.h>

#include "helio/error.hpp"
#include "helio/text.hpp"

namespace helio::detail {

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

ModelWriter::ModelWriter(std::string_view magic, int version) {
  put("magic", magic);
  put("version", std::to_string(version));
}

void ModelWriter::put(std::string_view key, std::string_view value) {
  body_.append(key);
  body_ += '=';
  body_.append(value);
  body_ += '\n';
}

void ModelWriter::put(std::string_view key, double value) { put(key, format_double17(value)); }

void ModelWriter::line(std::string_view text) {
  body_.append(text);
  body_ += '\n';
}

std::string ModelWriter::finish() && {
  char buf[32];
  std::snprintf(buf, sizeof buf, "crc32=%08x\n", crc32_of(body_));
  body_ += buf;
  return std::move(body_);
}

ModelReader::ModelReader(std::string_view bytes, std::string_view magic, int version) {
  std::size_t start = 0;
  std::vector<std::size_t> offsets;
  while (start < bytes.size()) {
    auto end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    offsets.push_back(start);
    lines_.push_back(bytes.substr(start, end - start));
    start = end + 1;
  }
  if (lines_.empty() || lines_[0] != "magic=" + std::string(magic)) {
    raise(ErrorCode::BadMagic, "expected magic=" + std::string(magic));
  }
  if (lines_.size() < 2 || lines_[1].substr(0, 8) != "version=") {
    raise(ErrorCode::VersionUnsupported, "missing version line");
  }
  if (lines_[1] != "version=" + std::to_string(version)) {
    raise(ErrorCode::VersionUnsupported, "unsupported " + std::string(lines_[1]));
  }
  const auto& last = lines_.back();
  if (last.substr(0, 6) != "crc32=" || last.size() != 14) raise(ErrorCode::ChecksumMismatch, "checksum line missing");
  char expected[16];
  std::snprintf(expected, sizeof expected, "%08x", crc32_of(bytes.substr(0, offsets.back())));
  if (last.substr(6) != expected) raise(ErrorCode::ChecksumMismatch, "checksum does not match contents");
  lines_.pop_back();
  pos_ = 2;
}

std::string_view ModelReader::next_line() {
  if (done()) raise(ErrorCode::MalformedModel, "unexpected end of model file");
  return lines_[pos_++];
}

std::string_view ModelReader::expect(std::string_view key) {
  const auto line = next_line();
  if (line.size() <= key.size() || line.substr(0, key.size()) != key || line[key.size()] != '=') {
    raise(ErrorCode::MalformedModel, "expected key '" + std::string(key) + "', got '" + std::string(line) + "'");
  }
  return line.substr(key.size() + 1);
}

double ModelReader::expect_double(std::string_view key) {
  try {
    return parse_double(expect(key));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedModel) throw;
    raise(ErrorCode::MalformedModel, "bad number for '" + std::string(key) + "'");
  }
}

long long ModelReader::expect_int(std::string_view key) {
  try {
    return parse_int(expect(key));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedModel) throw;
    raise(ErrorCode::MalformedModel, "bad integer for '" + std::string(key) + "'");
  }
}

std::vector<double> parse_numbers(std::string_view line) {
  std::vector<double> out;
  try {
    for (const auto& tok : split_list(line, ' ')) {
      if (!tok.empty()) out.push_back(parse_double(tok));
    }
  } catch (const Error&) {
    raise(ErrorCode::MalformedModel, "bad numeric row");
  }
  return out;
}

}  // namespace helio::detail
