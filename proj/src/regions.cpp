#include "geoscale/regions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "geoscale/csv.hpp"

namespace geoscale::regions {

using nlohmann::json;

RegionSet::RegionSet(std::vector<Region> regions)
    : regions_(std::move(regions)) {
  std::sort(regions_.begin(), regions_.end(),
            [](const Region& a, const Region& b) {
              return a.region_id < b.region_id;
            });
  std::set<std::string> country_set;
  for (const auto& r : regions_) country_set.insert(r.country_id);
  countries_.assign(country_set.begin(), country_set.end());

  region_country_.reserve(regions_.size());
  for (std::uint32_t i = 0; i < regions_.size(); ++i) {
    const auto& r = regions_[i];
    auto it = std::lower_bound(countries_.begin(), countries_.end(),
                               r.country_id);
    region_country_.push_back(
        static_cast<std::uint32_t>(it - countries_.begin()));
    by_id_.emplace(r.region_id, i);
    if (!r.population) missing_population_.push_back(r.region_id);
  }
}

std::optional<std::uint32_t> RegionSet::find(
    const std::string& region_id) const {
  auto it = by_id_.find(region_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::map<std::string, double> load_population_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open population file: " + path);
  std::map<std::string, double> pop;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = csv::split_line(line);
    if (f.size() != 2)
      throw std::runtime_error(path + ": expected 2 columns at line " +
                               std::to_string(lineno));
    auto v = csv::parse_double(f[1]);
    if (!v) {
      if (lineno == 1) continue;  // header
      throw std::runtime_error(path + ": non-numeric population at line " +
                               std::to_string(lineno));
    }
    if (*v <= 0)
      throw std::runtime_error(path + ": non-positive population for " +
                               f[0]);
    if (!pop.emplace(f[0], *v).second)
      throw std::runtime_error(path + ": duplicate population entry for " +
                               f[0]);
  }
  return pop;
}

namespace {

geo::Ring parse_ring(const json& arr, const std::string& feature_label) {
  geo::Ring ring;
  if (!arr.is_array() || arr.size() < 4)
    throw std::runtime_error("ring with fewer than 4 vertices in feature " +
                             feature_label);
  ring.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_array() || v.size() < 2)
      throw std::runtime_error("bad coordinate in feature " + feature_label);
    ring.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  if (!(ring.front() == ring.back()))
    throw std::runtime_error("unclosed ring in feature " + feature_label);
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    if (std::abs(ring[i + 1].lon - ring[i].lon) > 180.0)
      throw std::runtime_error(
          "antimeridian-crossing ring in feature " + feature_label +
          "; split the geometry before loading");
  }
  return ring;
}

geo::PolygonPart parse_polygon(const json& rings,
                               const std::string& feature_label) {
  if (!rings.is_array() || rings.empty())
    throw std::runtime_error("empty polygon in feature " + feature_label);
  geo::PolygonPart part;
  part.exterior = parse_ring(rings[0], feature_label);
  for (std::size_t i = 1; i < rings.size(); ++i)
    part.holes.push_back(parse_ring(rings[i], feature_label));
  return part;
}

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer())
    return std::to_string(v.get<std::int64_t>());
  throw std::runtime_error("region_id must be a string");
}

}  // namespace

RegionSet load_regions_text(const std::string& geojson_text,
                            const std::map<std::string, double>& population) {
  json doc = json::parse(geojson_text);
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features"))
    throw std::runtime_error("regions file is not a GeoJSON FeatureCollection");

  std::vector<Region> regions;
  std::set<std::string> seen;
  for (const auto& feature : doc["features"]) {
    if (!feature.contains("properties") ||
        !feature["properties"].contains("region_id"))
      throw std::runtime_error("feature without region_id property");
    const auto& props = feature["properties"];
    Region r;
    r.region_id = id_string(props["region_id"]);
    if (!seen.insert(r.region_id).second)
      throw std::runtime_error("duplicate region_id: " + r.region_id);
    r.name = props.value("name", r.region_id);
    r.country_id = props.contains("country_id")
                       ? id_string(props["country_id"])
                       : r.region_id;

    if (!feature.contains("geometry") || !feature["geometry"].is_object())
      throw std::runtime_error("feature " + r.region_id + " has no geometry");
    const auto& g = feature["geometry"];
    std::string type = g.value("type", "");
    if (type == "Polygon") {
      r.geometry.push_back(parse_polygon(g["coordinates"], r.region_id));
    } else if (type == "MultiPolygon") {
      for (const auto& poly : g["coordinates"])
        r.geometry.push_back(parse_polygon(poly, r.region_id));
    } else {
      throw std::runtime_error("unsupported geometry type '" + type +
                               "' in feature " + r.region_id);
    }
    auto it = population.find(r.region_id);
    if (it != population.end()) r.population = it->second;
    regions.push_back(std::move(r));
  }
  return RegionSet(std::move(regions));
}

RegionSet load_regions(const std::string& geojson_path,
                       const std::map<std::string, double>& population) {
  std::ifstream in(geojson_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open regions file: " + geojson_path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_regions_text(ss.str(), population);
}

void write_regions_geojson(const std::string& path,
                           const std::vector<Region>& regions) {
  json features = json::array();
  for (const auto& r : regions) {
    json coords = json::array();
    for (const auto& part : r.geometry) {
      json rings = json::array();
      auto ring_json = [](const geo::Ring& ring) {
        json arr = json::array();
        for (auto p : ring) arr.push_back({p.lon, p.lat});
        return arr;
      };
      rings.push_back(ring_json(part.exterior));
      for (const auto& hole : part.holes) rings.push_back(ring_json(hole));
      coords.push_back(std::move(rings));
    }
    json f = {{"type", "Feature"},
              {"properties",
               {{"region_id", r.region_id},
                {"name", r.name},
                {"country_id", r.country_id}}},
              {"geometry",
               {{"type", "MultiPolygon"}, {"coordinates", std::move(coords)}}}};
    features.push_back(std::move(f));
  }
  json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(1) << '\n';
  if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace geoscale::regions
