#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoscale/line_reader.hpp"

namespace geoscale::ingest {

// UTC wall-clock timestamp, second resolution. Fractional seconds are
// validated on parse and then dropped; nothing downstream is sub-second.
struct UtcTimestamp {
  std::int32_t year = 0;
  std::uint8_t month = 0, day = 0, hour = 0, minute = 0, second = 0;

  // YYYYMMDD, the distinct-active-day key
  std::uint32_t date_key() const {
    return static_cast<std::uint32_t>(year) * 10000u + month * 100u + day;
  }
  std::string to_string() const;    // "YYYY-MM-DD HH:MM:SS"
  std::string date_string() const;  // "YYYY-MM-DD"

  bool operator==(const UtcTimestamp&) const = default;
};

// Accepts exactly "YYYY-MM-DD HH:MM:SS" with an optional ".digits" suffix,
// fixed field widths, real calendar validation.
std::optional<UtcTimestamp> parse_timestamp(std::string_view cell);
std::optional<std::uint32_t> parse_date_key(std::string_view cell);  // "YYYY-MM-DD"
std::string date_key_to_string(std::uint32_t key);

struct MediaRecord {
  std::string object_id;
  std::string user_id;
  UtcTimestamp taken_at;
  double lon = 0;
  double lat = 0;

  bool operator==(const MediaRecord&) const = default;
};

enum class SkipReason : std::uint8_t {
  none = 0,
  not_geotagged,
  bad_date,
  malformed,
};

struct PruneStats {
  std::uint64_t total = 0;
  std::uint64_t kept = 0;
  std::uint64_t dropped_not_geotagged = 0;
  std::uint64_t dropped_bad_date = 0;
  std::uint64_t dropped_malformed = 0;

  PruneStats& operator+=(const PruneStats& o) {
    total += o.total;
    kept += o.kept;
    dropped_not_geotagged += o.dropped_not_geotagged;
    dropped_bad_date += o.dropped_bad_date;
    dropped_malformed += o.dropped_malformed;
    return *this;
  }
  bool consistent() const {
    return total == kept + dropped_not_geotagged + dropped_bad_date +
                        dropped_malformed;
  }
  std::string to_json() const;
};

// Column positions of the five consumed fields inside a tab-separated line.
// Lines whose field count differs from `width` are malformed.
struct ColumnSchema {
  std::size_t object_id = 0;
  std::size_t user_id = 1;
  std::size_t taken_at = 2;
  std::size_t lon = 3;
  std::size_t lat = 4;
  std::size_t width = 5;

  // "0,1,2,3,4" or "0,1,2,3,4,25" (trailing value = line width), or the
  // named form "object_id=0,user_id=1,taken_at=2,lon=3,lat=4,width=25".
  static ColumnSchema parse(std::string_view spec);
  void validate() const;  // throws when indices exceed width
};

struct ParseOutcome {
  SkipReason skip = SkipReason::none;
  MediaRecord record;  // valid iff skip == none
};

// Classification order mirrors the pruning order: field count first,
// then geotag presence/validity, then the timestamp grammar.
ParseOutcome parse_record(std::string_view line, const ColumnSchema& schema);

using RecordSink = std::function<void(MediaRecord&&)>;

// Streams `reader` through parse_record, feeding kept records to `sink`
// in input order. Chunks are parsed in parallel when threads != 1;
// the emitted sequence and the stats are identical for any thread count.
PruneStats prune_stream(io::LineReader& reader, const ColumnSchema& schema,
                        const RecordSink& sink, int threads = 1);

// Serial reference for the chunked kernel; used by tests and the benchmark.
PruneStats prune_stream_serial(io::LineReader& reader,
                               const ColumnSchema& schema,
                               const RecordSink& sink);

PruneStats prune_to_vector(io::LineReader& reader, const ColumnSchema& schema,
                           std::vector<MediaRecord>& out, int threads = 1);

// Record file round-trip. CSV carries a header line; the binary format is
// detected by its magic on read regardless of extension.
void write_records_csv(const std::string& path,
                       const std::vector<MediaRecord>& records);
void write_records_binary(const std::string& path,
                          const std::vector<MediaRecord>& records);
std::vector<MediaRecord> read_records(const std::string& path);

}  // namespace geoscale::ingest
