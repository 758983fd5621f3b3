#include "geoscale/ingest.hpp"

#include <omp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "geoscale/csv.hpp"

namespace geoscale::ingest {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> d = {31, 28, 31, 30, 31, 30,
                                            31, 31, 30, 31, 30, 31};
  if (m == 2 && leap(y)) return 29;
  return d[m - 1];
}

}  // namespace

std::string UtcTimestamp::to_string() const {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02u:%02u:%02u", year, month,
                day, hour, minute, second);
  return buf;
}

std::string UtcTimestamp::date_string() const {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
  return buf;
}

std::optional<UtcTimestamp> parse_timestamp(std::string_view cell) {
  // YYYY-MM-DD HH:MM:SS(.digits)?
  if (cell.size() < 19) return std::nullopt;
  if (cell[4] != '-' || cell[7] != '-' || cell[10] != ' ' || cell[13] != ':' ||
      cell[16] != ':')
    return std::nullopt;
  auto y = cell.substr(0, 4), mo = cell.substr(5, 2), d = cell.substr(8, 2),
       h = cell.substr(11, 2), mi = cell.substr(14, 2), s = cell.substr(17, 2);
  if (!all_digits(y) || !all_digits(mo) || !all_digits(d) || !all_digits(h) ||
      !all_digits(mi) || !all_digits(s))
    return std::nullopt;
  if (cell.size() > 19) {
    if (cell[19] != '.' || !all_digits(cell.substr(20))) return std::nullopt;
  }
  UtcTimestamp ts;
  ts.year = to_int(y);
  ts.month = static_cast<std::uint8_t>(to_int(mo));
  ts.day = static_cast<std::uint8_t>(to_int(d));
  ts.hour = static_cast<std::uint8_t>(to_int(h));
  ts.minute = static_cast<std::uint8_t>(to_int(mi));
  ts.second = static_cast<std::uint8_t>(to_int(s));
  if (ts.year < 1 || ts.month < 1 || ts.month > 12) return std::nullopt;
  if (ts.day < 1 || ts.day > days_in_month(ts.year, ts.month))
    return std::nullopt;
  if (ts.hour > 23 || ts.minute > 59 || ts.second > 59) return std::nullopt;
  return ts;
}

std::optional<std::uint32_t> parse_date_key(std::string_view cell) {
  if (cell.size() != 10 || cell[4] != '-' || cell[7] != '-')
    return std::nullopt;
  auto y = cell.substr(0, 4), mo = cell.substr(5, 2), d = cell.substr(8, 2);
  if (!all_digits(y) || !all_digits(mo) || !all_digits(d)) return std::nullopt;
  int yy = to_int(y), mm = to_int(mo), dd = to_int(d);
  if (yy < 1 || mm < 1 || mm > 12 || dd < 1 || dd > days_in_month(yy, mm))
    return std::nullopt;
  return static_cast<std::uint32_t>(yy) * 10000u + mm * 100u + dd;
}

std::string date_key_to_string(std::uint32_t key) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04u-%02u-%02u", key / 10000u,
                key / 100u % 100u, key % 100u);
  return buf;
}

std::string PruneStats::to_json() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "{\n  \"total\": %llu,\n  \"kept\": %llu,\n"
                "  \"dropped_not_geotagged\": %llu,\n"
                "  \"dropped_bad_date\": %llu,\n"
                "  \"dropped_malformed\": %llu\n}\n",
                static_cast<unsigned long long>(total),
                static_cast<unsigned long long>(kept),
                static_cast<unsigned long long>(dropped_not_geotagged),
                static_cast<unsigned long long>(dropped_bad_date),
                static_cast<unsigned long long>(dropped_malformed));
  return buf;
}

ColumnSchema ColumnSchema::parse(std::string_view spec) {
  ColumnSchema s;
  auto parts = csv::split_raw(spec, ',');
  auto as_index = [&](std::string_view v) -> std::size_t {
    auto n = csv::parse_int(v);
    if (!n || *n < 0) throw std::runtime_error("bad schema index: " + std::string(v));
    return static_cast<std::size_t>(*n);
  };
  bool named = spec.find('=') != std::string_view::npos;
  if (named) {
    bool width_given = false;
    for (auto part : parts) {
      auto eq = part.find('=');
      if (eq == std::string_view::npos)
        throw std::runtime_error("bad schema entry: " + std::string(part));
      auto key = part.substr(0, eq);
      auto idx = as_index(part.substr(eq + 1));
      if (key == "object_id") s.object_id = idx;
      else if (key == "user_id") s.user_id = idx;
      else if (key == "taken_at") s.taken_at = idx;
      else if (key == "lon") s.lon = idx;
      else if (key == "lat") s.lat = idx;
      else if (key == "width") { s.width = idx; width_given = true; }
      else throw std::runtime_error("unknown schema key: " + std::string(key));
    }
    if (!width_given)
      s.width = std::max({s.object_id, s.user_id, s.taken_at, s.lon, s.lat}) + 1;
  } else {
    if (parts.size() != 5 && parts.size() != 6)
      throw std::runtime_error(
          "schema needs 5 indices (object_id,user_id,taken_at,lon,lat) and "
          "an optional width");
    s.object_id = as_index(parts[0]);
    s.user_id = as_index(parts[1]);
    s.taken_at = as_index(parts[2]);
    s.lon = as_index(parts[3]);
    s.lat = as_index(parts[4]);
    s.width = parts.size() == 6
                  ? as_index(parts[5])
                  : std::max({s.object_id, s.user_id, s.taken_at, s.lon,
                              s.lat}) + 1;
  }
  s.validate();
  return s;
}

void ColumnSchema::validate() const {
  std::size_t hi = std::max({object_id, user_id, taken_at, lon, lat});
  if (hi >= width)
    throw std::runtime_error("schema width " + std::to_string(width) +
                             " does not cover column " + std::to_string(hi));
}

ParseOutcome parse_record(std::string_view line, const ColumnSchema& schema) {
  ParseOutcome out;
  auto fields = csv::split_raw(line, '\t');
  if (fields.size() != schema.width) {
    out.skip = SkipReason::malformed;
    return out;
  }
  auto lon_cell = fields[schema.lon];
  auto lat_cell = fields[schema.lat];
  if (lon_cell.empty() || lat_cell.empty()) {
    out.skip = SkipReason::not_geotagged;
    return out;
  }
  auto lon = csv::parse_double(lon_cell);
  auto lat = csv::parse_double(lat_cell);
  if (!lon || !lat) {
    out.skip = SkipReason::malformed;
    return out;
  }
  // out-of-range (incl. non-finite) counts as not geo-tagged
  if (!(std::abs(*lat) <= 90.0) || !(std::abs(*lon) <= 180.0)) {
    out.skip = SkipReason::not_geotagged;
    return out;
  }
  auto ts = parse_timestamp(fields[schema.taken_at]);
  if (!ts) {
    out.skip = SkipReason::bad_date;
    return out;
  }
  if (fields[schema.object_id].empty() || fields[schema.user_id].empty()) {
    out.skip = SkipReason::malformed;
    return out;
  }
  out.record.object_id = std::string(fields[schema.object_id]);
  out.record.user_id = std::string(fields[schema.user_id]);
  out.record.taken_at = *ts;
  out.record.lon = *lon;
  out.record.lat = *lat;
  return out;
}

namespace {

void count_skip(PruneStats& st, SkipReason r) {
  switch (r) {
    case SkipReason::not_geotagged: ++st.dropped_not_geotagged; break;
    case SkipReason::bad_date: ++st.dropped_bad_date; break;
    case SkipReason::malformed: ++st.dropped_malformed; break;
    case SkipReason::none: break;
  }
}

constexpr std::size_t kChunkLines = 16384;

}  // namespace

PruneStats prune_stream_serial(io::LineReader& reader,
                               const ColumnSchema& schema,
                               const RecordSink& sink) {
  PruneStats stats;
  std::string line;
  while (reader.next_line(line)) {
    ++stats.total;
    ParseOutcome out = parse_record(line, schema);
    if (out.skip == SkipReason::none) {
      ++stats.kept;
      sink(std::move(out.record));
    } else {
      count_skip(stats, out.skip);
    }
  }
  return stats;
}

PruneStats prune_stream(io::LineReader& reader, const ColumnSchema& schema,
                        const RecordSink& sink, int threads) {
  if (threads == 1) return prune_stream_serial(reader, schema, sink);
  int nthreads = threads > 0 ? threads : omp_get_max_threads();

  PruneStats stats;
  std::vector<std::string> lines;
  lines.reserve(kChunkLines);
  std::vector<ParseOutcome> parsed(kChunkLines);
  std::string line;

  bool more = true;
  while (more) {
    lines.clear();
    while (lines.size() < kChunkLines && (more = reader.next_line(line)))
      lines.push_back(line);

    auto n = static_cast<std::int64_t>(lines.size());
#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (std::int64_t i = 0; i < n; ++i)
      parsed[static_cast<std::size_t>(i)] = parse_record(lines[static_cast<std::size_t>(i)], schema);

    // in-order emit keeps the output identical to the serial path
    for (std::int64_t i = 0; i < n; ++i) {
      auto& out = parsed[static_cast<std::size_t>(i)];
      ++stats.total;
      if (out.skip == SkipReason::none) {
        ++stats.kept;
        sink(std::move(out.record));
      } else {
        count_skip(stats, out.skip);
      }
    }
  }
  return stats;
}

PruneStats prune_to_vector(io::LineReader& reader, const ColumnSchema& schema,
                           std::vector<MediaRecord>& out, int threads) {
  return prune_stream(
      reader, schema, [&](MediaRecord&& r) { out.push_back(std::move(r)); },
      threads);
}

namespace {

constexpr char kBinMagic[8] = {'G', 'S', 'R', 'E', 'C', '0', '0', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8 & 0xff));
  out.push_back(static_cast<char>(v >> 16 & 0xff));
  out.push_back(static_cast<char>(v >> 24 & 0xff));
}

std::uint32_t get_u32(const char* p) {
  return static_cast<std::uint8_t>(p[0]) |
         static_cast<std::uint32_t>(static_cast<std::uint8_t>(p[1])) << 8 |
         static_cast<std::uint32_t>(static_cast<std::uint8_t>(p[2])) << 16 |
         static_cast<std::uint32_t>(static_cast<std::uint8_t>(p[3])) << 24;
}

}  // namespace

void write_records_csv(const std::string& path,
                       const std::vector<MediaRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::string buf = "object_id,user_id,taken_at,lon,lat\n";
  for (const auto& r : records) {
    csv::write_line(buf, {r.object_id, r.user_id, r.taken_at.to_string(),
                          csv::format_double(r.lon), csv::format_double(r.lat)});
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<long>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<long>(buf.size()));
  if (!out) throw std::runtime_error("write failure: " + path);
}

void write_records_binary(const std::string& path,
                          const std::vector<MediaRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::string buf(kBinMagic, sizeof kBinMagic);
  for (const auto& r : records) {
    put_u32(buf, static_cast<std::uint32_t>(r.object_id.size()));
    buf += r.object_id;
    put_u32(buf, static_cast<std::uint32_t>(r.user_id.size()));
    buf += r.user_id;
    put_u32(buf, static_cast<std::uint32_t>(r.taken_at.year));
    buf.push_back(static_cast<char>(r.taken_at.month));
    buf.push_back(static_cast<char>(r.taken_at.day));
    buf.push_back(static_cast<char>(r.taken_at.hour));
    buf.push_back(static_cast<char>(r.taken_at.minute));
    buf.push_back(static_cast<char>(r.taken_at.second));
    static_assert(sizeof(double) == 8);
    buf.append(reinterpret_cast<const char*>(&r.lon), 8);
    buf.append(reinterpret_cast<const char*>(&r.lat), 8);
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<long>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<long>(buf.size()));
  if (!out) throw std::runtime_error("write failure: " + path);
}

namespace {

std::vector<MediaRecord> read_records_binary(const std::string& path,
                                             std::ifstream& in) {
  // the caller already consumed the magic
  std::vector<MediaRecord> records;
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (pos + n > data.size())
      throw std::runtime_error("truncated record file: " + path);
  };
  while (pos < data.size()) {
    MediaRecord r;
    need(4);
    std::uint32_t len = get_u32(data.data() + pos);
    pos += 4;
    need(len);
    r.object_id.assign(data, pos, len);
    pos += len;
    need(4);
    len = get_u32(data.data() + pos);
    pos += 4;
    need(len);
    r.user_id.assign(data, pos, len);
    pos += len;
    need(4 + 5 + 16);
    r.taken_at.year = static_cast<std::int32_t>(get_u32(data.data() + pos));
    pos += 4;
    r.taken_at.month = static_cast<std::uint8_t>(data[pos++]);
    r.taken_at.day = static_cast<std::uint8_t>(data[pos++]);
    r.taken_at.hour = static_cast<std::uint8_t>(data[pos++]);
    r.taken_at.minute = static_cast<std::uint8_t>(data[pos++]);
    r.taken_at.second = static_cast<std::uint8_t>(data[pos++]);
    std::memcpy(&r.lon, data.data() + pos, 8);
    pos += 8;
    std::memcpy(&r.lat, data.data() + pos, 8);
    pos += 8;
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace

std::vector<MediaRecord> read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open record file: " + path);
  char magic[8] = {};
  in.read(magic, sizeof magic);
  if (in.gcount() == 8 && std::memcmp(magic, kBinMagic, 8) == 0)
    return read_records_binary(path, in);

  in.clear();
  in.seekg(0);
  std::vector<MediaRecord> records;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) continue;  // header
    if (line.empty()) continue;
    auto f = csv::split_line(line);
    if (f.size() != 5)
      throw std::runtime_error(path + ": bad record row at line " +
                               std::to_string(lineno));
    MediaRecord r;
    r.object_id = f[0];
    r.user_id = f[1];
    auto ts = parse_timestamp(f[2]);
    auto lon = csv::parse_double(f[3]);
    auto lat = csv::parse_double(f[4]);
    if (!ts || !lon || !lat)
      throw std::runtime_error(path + ": bad record row at line " +
                               std::to_string(lineno));
    r.taken_at = *ts;
    r.lon = *lon;
    r.lat = *lat;
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace geoscale::ingest
