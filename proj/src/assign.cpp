#include "geoscale/assign.hpp"

#include <omp.h>

#include <fstream>
#include <stdexcept>

#include "geoscale/csv.hpp"

namespace geoscale::assign {

std::optional<std::uint32_t> assign_brute_force(geo::LonLat p,
                                                const regions::RegionSet& rs) {
  // regions are sorted by id, first hit is the smallest region_id
  for (std::uint32_t i = 0; i < rs.size(); ++i)
    if (geo::multipolygon_contains(p, rs[i].geometry)) return i;
  return std::nullopt;
}

std::vector<AssignedRecord> assign_batch_serial(
    std::span<const ingest::MediaRecord> records,
    const spatial::SpatialIndex& index) {
  std::vector<AssignedRecord> out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    out[i] = {records[i], index.locate({records[i].lon, records[i].lat})};
  return out;
}

std::vector<AssignedRecord> assign_batch(
    std::span<const ingest::MediaRecord> records,
    const spatial::SpatialIndex& index, int threads) {
  if (threads == 1) return assign_batch_serial(records, index);
  int nthreads = threads > 0 ? threads : omp_get_max_threads();

  std::vector<AssignedRecord> out(records.size());
  auto n = static_cast<std::int64_t>(records.size());
#pragma omp parallel for schedule(static) num_threads(nthreads)
  for (std::int64_t i = 0; i < n; ++i) {
    auto idx = static_cast<std::size_t>(i);
    out[idx] = {records[idx],
                index.locate({records[idx].lon, records[idx].lat})};
  }
  return out;
}

void write_assigned_csv(const std::string& path,
                        const std::vector<AssignedRecord>& assigned,
                        const regions::RegionSet& rs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::string buf = "object_id,user_id,taken_date,region_id\n";
  for (const auto& a : assigned) {
    csv::write_line(buf, {a.record.object_id, a.record.user_id,
                          a.record.taken_at.date_string(),
                          a.region ? rs[*a.region].region_id : ""});
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<long>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<long>(buf.size()));
  if (!out) throw std::runtime_error("write failure: " + path);
}

std::vector<AssignedRow> read_assigned_csv(const std::string& path,
                                           const regions::RegionSet& rs) {
  auto table = csv::read_file(path);
  if (table.header !=
      std::vector<std::string>{"object_id", "user_id", "taken_date",
                               "region_id"})
    throw std::runtime_error(path + ": unexpected assigned.csv header");
  std::vector<AssignedRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    if (f.size() != 4)
      throw std::runtime_error(path + ": bad row " + std::to_string(i + 2));
    AssignedRow row;
    row.object_id = f[0];
    row.user_id = f[1];
    auto key = ingest::parse_date_key(f[2]);
    if (!key)
      throw std::runtime_error(path + ": bad taken_date at row " +
                               std::to_string(i + 2));
    row.date_key = *key;
    if (!f[3].empty()) {
      auto idx = rs.find(f[3]);
      if (!idx)
        throw std::runtime_error(path + ": unknown region_id '" + f[3] +
                                 "' at row " + std::to_string(i + 2));
      row.region = idx;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<AssignedRow> to_rows(const std::vector<AssignedRecord>& assigned) {
  std::vector<AssignedRow> rows;
  rows.reserve(assigned.size());
  for (const auto& a : assigned)
    rows.push_back({a.record.object_id, a.record.user_id,
                    a.record.taken_at.date_key(), a.region});
  return rows;
}

}  // namespace geoscale::assign
