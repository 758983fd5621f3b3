#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoscale/geometry.hpp"

namespace geoscale::regions {

struct Region {
  std::string region_id;
  std::string name;
  std::string country_id;  // == region_id when the region is a country
  geo::MultiPolygon geometry;
  std::optional<double> population;
};

// Immutable after load; regions are held sorted by region_id so that a
// first-containment scan realizes the smallest-id tie rule.
class RegionSet {
 public:
  explicit RegionSet(std::vector<Region> regions);

  std::size_t size() const { return regions_.size(); }
  const Region& operator[](std::size_t i) const { return regions_[i]; }
  const std::vector<Region>& all() const { return regions_; }

  std::optional<std::uint32_t> find(const std::string& region_id) const;

  // Countries are the distinct country_ids, sorted.
  const std::vector<std::string>& countries() const { return countries_; }
  std::uint32_t country_index(std::uint32_t region_index) const {
    return region_country_[region_index];
  }
  const std::string& country_of(std::uint32_t region_index) const {
    return countries_[region_country_[region_index]];
  }

  // Region ids that carry no population entry.
  const std::vector<std::string>& missing_population() const {
    return missing_population_;
  }

 private:
  std::vector<Region> regions_;
  std::vector<std::string> countries_;
  std::vector<std::uint32_t> region_country_;
  std::vector<std::string> missing_population_;
  std::map<std::string, std::uint32_t> by_id_;
};

// region_id -> population (persons). Optional header line is skipped when
// its population cell is not numeric. Non-positive or duplicate entries
// are hard errors.
std::map<std::string, double> load_population_csv(const std::string& path);

// GeoJSON FeatureCollection; features carry properties region_id, name
// (optional) and country_id (optional, defaults to region_id). Rings must
// be closed, have >= 4 vertices and stay clear of the antimeridian.
RegionSet load_regions(const std::string& geojson_path,
                       const std::map<std::string, double>& population);
RegionSet load_regions_text(const std::string& geojson_text,
                            const std::map<std::string, double>& population);

void write_regions_geojson(const std::string& path,
                           const std::vector<Region>& regions);

}  // namespace geoscale::regions
