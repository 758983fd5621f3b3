#include "geoscale/line_reader.hpp"

#include <zlib.h>

#include <cstring>
#include <stdexcept>

namespace geoscale::io {

namespace {
constexpr std::size_t kChunk = 1 << 16;
}

struct LineReader::GzState {
  z_stream strm{};
  bool stream_end = false;

  GzState() {
    // 15+16: gzip wrapper only
    if (inflateInit2(&strm, 15 + 16) != Z_OK)
      throw std::runtime_error("zlib: inflateInit failed");
  }
  ~GzState() { inflateEnd(&strm); }
};

LineReader::LineReader(const std::string& path) : path_(path) {
  file_ = std::fopen(path.c_str(), "rb");
  if (!file_) throw std::runtime_error("cannot open input file: " + path);
  raw_.resize(kChunk);

  int c0 = std::fgetc(file_);
  int c1 = std::fgetc(file_);
  bool gzip = (c0 == 0x1f && c1 == 0x8b);
  std::rewind(file_);
  if (gzip) gz_ = std::make_unique<GzState>();
}

LineReader::~LineReader() {
  if (file_) std::fclose(file_);
}

bool LineReader::fill() {
  if (eof_) return false;
  if (pos_ > 0) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<long>(pos_));
    pos_ = 0;
  }
  std::size_t n = std::fread(raw_.data(), 1, raw_.size(), file_);
  if (n == 0) {
    if (std::ferror(file_))
      throw std::runtime_error("read failure in " + path_ + " after line " +
                               std::to_string(line_number_));
    eof_ = true;
    return false;
  }
  if (!gz_) {
    buf_.insert(buf_.end(), raw_.data(), raw_.data() + n);
    return true;
  }

  auto& strm = gz_->strm;
  strm.next_in = reinterpret_cast<Bytef*>(raw_.data());
  strm.avail_in = static_cast<uInt>(n);
  char out[kChunk];
  while (strm.avail_in > 0) {
    if (gz_->stream_end) {
      // concatenated gzip members
      if (inflateReset(&strm) != Z_OK)
        throw std::runtime_error("zlib: inflateReset failed in " + path_);
      gz_->stream_end = false;
    }
    strm.next_out = reinterpret_cast<Bytef*>(out);
    strm.avail_out = sizeof out;
    int rc = inflate(&strm, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END)
      throw std::runtime_error("corrupt gzip stream in " + path_ +
                               " after line " + std::to_string(line_number_));
    buf_.insert(buf_.end(), out, out + (sizeof out - strm.avail_out));
    if (rc == Z_STREAM_END) gz_->stream_end = true;
  }
  return true;
}

bool LineReader::next_line(std::string& out) {
  while (true) {
    const char* base = buf_.data() + pos_;
    std::size_t avail = buf_.size() - pos_;
    const char* nl = avail == 0 ? nullptr
                                : static_cast<const char*>(
                                      std::memchr(base, '\n', avail));
    if (nl) {
      std::size_t len = static_cast<std::size_t>(nl - base);
      out.assign(base, len);
      pos_ += len + 1;
      if (!out.empty() && out.back() == '\r') out.pop_back();
      ++line_number_;
      return true;
    }
    if (!fill()) {
      // fill() compacted the buffer, recompute the tail
      if (pos_ >= buf_.size()) return false;
      out.assign(buf_.data() + pos_, buf_.size() - pos_);
      pos_ = buf_.size();
      if (!out.empty() && out.back() == '\r') out.pop_back();
      ++line_number_;
      return true;
    }
  }
}

}  // namespace geoscale::io
