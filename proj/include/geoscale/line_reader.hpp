#pragma once

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace geoscale::io {

// Streams LF-terminated lines out of a plain or gzip-compressed file.
// Compression is detected from the 0x1f 0x8b magic, not the file name.
// Memory use is bounded by the longest line plus a fixed chunk buffer.
class LineReader {
 public:
  explicit LineReader(const std::string& path);
  ~LineReader();

  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  // Returns false at end of input. A trailing '\r' is stripped so CRLF
  // files parse the same as LF files. Throws on stream-level failures,
  // naming the line number reached.
  bool next_line(std::string& out);

  std::uint64_t line_number() const { return line_number_; }

 private:
  bool fill();

  struct GzState;
  std::FILE* file_ = nullptr;
  std::unique_ptr<GzState> gz_;
  std::string path_;
  std::vector<char> raw_;      // compressed (or plain) file chunk
  std::vector<char> buf_;      // decoded bytes not yet consumed
  std::size_t pos_ = 0;
  bool eof_ = false;
  std::uint64_t line_number_ = 0;
};

}  // namespace geoscale::io
