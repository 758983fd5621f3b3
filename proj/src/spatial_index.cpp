#include "geoscale/spatial_index.hpp"

#include <algorithm>
#include <cmath>

namespace geoscale::spatial {

SpatialIndex::SpatialIndex(const regions::RegionSet& rs) {
  prepared_.reserve(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    PreparedRegion pr;
    for (const auto& part : rs[i].geometry) {
      PreparedPart pp;
      pp.exterior = {geo::ring_box(part.exterior), &part.exterior};
      pp.box = pp.exterior.box;
      for (const auto& hole : part.holes)
        pp.holes.push_back({geo::ring_box(hole), &hole});
      pr.box.expand(pp.box);
      pr.parts.push_back(std::move(pp));
    }
    prepared_.push_back(std::move(pr));
  }

  // grid sized to keep a handful of candidates per cell
  int n = static_cast<int>(rs.size());
  cols_ = std::clamp(4 * static_cast<int>(std::ceil(std::sqrt(double(std::max(n, 1))))), 8, 1024);
  rows_ = std::max(cols_ / 2, 4);
  inv_dlon_ = cols_ / 360.0;
  inv_dlat_ = rows_ / 180.0;
  cells_.resize(static_cast<std::size_t>(cols_) * rows_);

  for (std::uint32_t i = 0; i < prepared_.size(); ++i) {
    const auto& b = prepared_[i].box;
    if (b.min_lon > b.max_lon) continue;  // empty geometry
    int c0 = std::clamp(static_cast<int>((b.min_lon - lon0_) * inv_dlon_), 0, cols_ - 1);
    int c1 = std::clamp(static_cast<int>((b.max_lon - lon0_) * inv_dlon_), 0, cols_ - 1);
    int r0 = std::clamp(static_cast<int>((b.min_lat - lat0_) * inv_dlat_), 0, rows_ - 1);
    int r1 = std::clamp(static_cast<int>((b.max_lat - lat0_) * inv_dlat_), 0, rows_ - 1);
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c)
        cells_[static_cast<std::size_t>(r) * cols_ + c].push_back(i);
  }
  // insertion order is ascending already; keep it explicit
  for (auto& cell : cells_) std::sort(cell.begin(), cell.end());
}

std::size_t SpatialIndex::cell_of(geo::LonLat p) const {
  int c = std::clamp(static_cast<int>((p.lon - lon0_) * inv_dlon_), 0, cols_ - 1);
  int r = std::clamp(static_cast<int>((p.lat - lat0_) * inv_dlat_), 0, rows_ - 1);
  return static_cast<std::size_t>(r) * cols_ + c;
}

bool SpatialIndex::region_contains(std::uint32_t idx, geo::LonLat p) const {
  for (const auto& part : prepared_[idx].parts) {
    if (!part.box.contains(p)) continue;
    if (geo::point_on_ring(p, *part.exterior.ring)) return true;
    if (!geo::ring_parity_odd(p, *part.exterior.ring)) continue;
    bool in_hole = false;
    for (const auto& hole : part.holes) {
      if (!hole.box.contains(p)) continue;
      if (geo::point_on_ring(p, *hole.ring)) return true;
      if (geo::ring_parity_odd(p, *hole.ring)) {
        in_hole = true;
        break;
      }
    }
    if (!in_hole) return true;
  }
  return false;
}

std::optional<std::uint32_t> SpatialIndex::locate(geo::LonLat p) const {
  const auto& cell = cells_[cell_of(p)];
  for (std::uint32_t idx : cell) {
    if (!prepared_[idx].box.contains(p)) continue;
    if (region_contains(idx, p)) return idx;
  }
  return std::nullopt;
}

}  // namespace geoscale::spatial
