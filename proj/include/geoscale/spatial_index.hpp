#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "geoscale/geometry.hpp"
#include "geoscale/regions.hpp"

namespace geoscale::spatial {

// Point-lookup index over a RegionSet. A uniform lon/lat grid narrows the
// candidate regions, then per-region and per-ring bounding boxes gate the
// even-odd test. Candidate lists keep ascending region order, so the first
// containment hit is the smallest region_id. Holds pointers into the
// RegionSet, which must outlive the index.
class SpatialIndex {
 public:
  explicit SpatialIndex(const regions::RegionSet& rs);

  std::optional<std::uint32_t> locate(geo::LonLat p) const;

 private:
  struct PreparedRing {
    geo::Box box;
    const geo::Ring* ring = nullptr;
  };
  struct PreparedPart {
    geo::Box box;  // exterior box
    PreparedRing exterior;
    std::vector<PreparedRing> holes;
  };
  struct PreparedRegion {
    geo::Box box;
    std::vector<PreparedPart> parts;
  };

  bool region_contains(std::uint32_t idx, geo::LonLat p) const;
  std::size_t cell_of(geo::LonLat p) const;

  std::vector<PreparedRegion> prepared_;
  std::vector<std::vector<std::uint32_t>> cells_;
  int cols_ = 1, rows_ = 1;
  double lon0_ = -180, lat0_ = -90, inv_dlon_ = 0, inv_dlat_ = 0;
};

}  // namespace geoscale::spatial
