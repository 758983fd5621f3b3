#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geoscale/ingest.hpp"
#include "geoscale/regions.hpp"
#include "geoscale/spatial_index.hpp"

namespace geoscale::assign {

struct AssignedRecord {
  ingest::MediaRecord record;
  std::optional<std::uint32_t> region;  // index into the RegionSet
};

// Exhaustive scan over every region's raw geometry, no index structures.
// This is the reference the indexed path is checked against.
std::optional<std::uint32_t> assign_brute_force(geo::LonLat p,
                                                const regions::RegionSet& rs);

inline std::optional<std::uint32_t> assign_point(
    geo::LonLat p, const spatial::SpatialIndex& index) {
  return index.locate(p);
}

// Element-wise assignment; output order equals input order for any thread
// count. threads <= 0 means the OpenMP default.
std::vector<AssignedRecord> assign_batch(
    std::span<const ingest::MediaRecord> records,
    const spatial::SpatialIndex& index, int threads = 1);

std::vector<AssignedRecord> assign_batch_serial(
    std::span<const ingest::MediaRecord> records,
    const spatial::SpatialIndex& index);

// assigned.csv: object_id,user_id,taken_date,region_id (empty = unassigned)
void write_assigned_csv(const std::string& path,
                        const std::vector<AssignedRecord>& assigned,
                        const regions::RegionSet& rs);

// One row per record kept by assignment aggregation: records with an empty
// region cell load as nullopt.
struct AssignedRow {
  std::string object_id;
  std::string user_id;
  std::uint32_t date_key = 0;
  std::optional<std::uint32_t> region;
};

std::vector<AssignedRow> read_assigned_csv(const std::string& path,
                                           const regions::RegionSet& rs);

std::vector<AssignedRow> to_rows(const std::vector<AssignedRecord>& assigned);

}  // namespace geoscale::assign
