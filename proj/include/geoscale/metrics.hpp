#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "geoscale/assign.hpp"
#include "geoscale/home.hpp"
#include "geoscale/regions.hpp"

namespace geoscale::metrics {

struct TableRow {
  std::string region_id;
  double population = 0;      // persons, > 0 for every row kept
  double attractiveness = 0;  // >= 0
};

struct AttractivenessTable {
  std::vector<TableRow> rows;  // sorted by region_id
  std::string source_label;
  // region ids dropped for missing/non-positive population; reported in
  // the metadata sidecar, never silently lost
  std::vector<std::string> excluded;
  std::string od_orientation;  // set by the migration path
};

// Count of objects taken in each region by users whose defined home
// country differs from the region's country. Undefined-home users
// contribute nothing.
AttractivenessTable flickr_attractiveness(
    const std::vector<assign::AssignedRow>& rows, const home::HomeMap& homes,
    const regions::RegionSet& rs);

struct ODMatrix {
  std::vector<std::string> countries;            // sorted union of ids
  std::vector<std::vector<double>> stock;        // stock[dest][origin]
  std::string orientation;                       // echoed into metadata
};

// Header row carries origin ids, first column destination ids. A first
// header cell of "origin\dest" (any spelling containing "origin" before
// "dest") transposes on load; everything else reads as rows=destination.
ODMatrix load_od_matrix(const std::string& path);

// A(d) = sum of stock[d][o] over origins o != d; the diagonal never counts.
AttractivenessTable migration_attractiveness(
    const ODMatrix& od, const std::map<std::string, double>& population);

struct CityRecord {
  std::string city;
  std::string country_id;
  double population = 0;
  bool is_capital = false;
};

// cities.csv: city,country_id,population,is_capital
std::vector<CityRecord> load_cities_csv(const std::string& path);

struct CountryStructure {
  std::map<std::string, double> city_count;          // cities above threshold
  std::map<std::string, double> capital_population;  // absent without capital
};

CountryStructure country_structure(const std::vector<CityRecord>& cities,
                                   double threshold = 300000);

// Joins a country->value map with populations into a fit-ready table.
AttractivenessTable structure_table(
    const std::map<std::string, double>& values,
    const std::map<std::string, double>& population,
    const std::string& source_label);

// table csv: region_id,population,attractiveness (+ JSON metadata sidecar)
void write_table_csv(const std::string& path, const AttractivenessTable& t);
AttractivenessTable read_table_csv(const std::string& path);
std::string table_meta_json(const AttractivenessTable& t);

}  // namespace geoscale::metrics
