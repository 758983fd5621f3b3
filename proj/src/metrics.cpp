#include "geoscale/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "geoscale/csv.hpp"

namespace geoscale::metrics {

AttractivenessTable flickr_attractiveness(
    const std::vector<assign::AssignedRow>& rows, const home::HomeMap& homes,
    const regions::RegionSet& rs) {
  std::vector<std::int64_t> counts(rs.size(), 0);
  for (const auto& row : rows) {
    if (!row.region) continue;
    auto it = homes.find(row.user_id);
    if (it == homes.end() || !it->second) continue;
    if (*it->second != rs.country_of(*row.region)) ++counts[*row.region];
  }

  AttractivenessTable t;
  t.source_label = "flickr";
  for (std::uint32_t i = 0; i < rs.size(); ++i) {
    const auto& r = rs[i];
    if (!r.population || *r.population <= 0) {
      t.excluded.push_back(r.region_id);
      continue;
    }
    t.rows.push_back({r.region_id, *r.population,
                      static_cast<double>(counts[i])});
  }
  return t;
}

ODMatrix load_od_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open OD matrix: " + path);
  std::vector<std::vector<std::string>> grid;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    grid.push_back(csv::split_line(line));
  }
  if (grid.size() < 2)
    throw std::runtime_error(path + ": OD matrix needs a header and rows");
  const auto& header = grid[0];
  if (header.size() < 2)
    throw std::runtime_error(path + ": OD header needs at least one id");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i].size() != header.size())
      throw std::runtime_error(path + ": ragged row " + std::to_string(i + 1) +
                               " (" + std::to_string(grid[i].size()) +
                               " cells, header has " +
                               std::to_string(header.size()) + ")");

  // first header cell declares the orientation
  std::string corner = header[0];
  std::string lower;
  for (char c : corner)
    lower.push_back(
        static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  auto o = lower.find("origin");
  auto d = lower.find("dest");
  bool transposed =
      o != std::string::npos && d != std::string::npos && o < d;

  std::set<std::string> ids;
  for (std::size_t j = 1; j < header.size(); ++j) ids.insert(header[j]);
  for (std::size_t i = 1; i < grid.size(); ++i) ids.insert(grid[i][0]);

  ODMatrix od;
  od.countries.assign(ids.begin(), ids.end());
  od.orientation = transposed ? "file rows = origin (transposed on load)"
                              : "file rows = destination";
  auto index_of = [&](const std::string& id) {
    return static_cast<std::size_t>(
        std::lower_bound(od.countries.begin(), od.countries.end(), id) -
        od.countries.begin());
  };
  od.stock.assign(od.countries.size(),
                  std::vector<double>(od.countries.size(), 0.0));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    std::size_t row_idx = index_of(grid[i][0]);
    for (std::size_t j = 1; j < header.size(); ++j) {
      const auto& cell = grid[i][j];
      double v = 0;
      if (!cell.empty()) {
        auto parsed = csv::parse_double(cell);
        if (!parsed)
          throw std::runtime_error(path + ": non-numeric cell at row " +
                                   std::to_string(i + 1) + ", column " +
                                   std::to_string(j + 1));
        v = *parsed;
      }
      std::size_t col_idx = index_of(header[j]);
      if (transposed)
        od.stock[col_idx][row_idx] += v;
      else
        od.stock[row_idx][col_idx] += v;
    }
  }
  return od;
}

AttractivenessTable migration_attractiveness(
    const ODMatrix& od, const std::map<std::string, double>& population) {
  AttractivenessTable t;
  t.source_label = "migration";
  t.od_orientation = od.orientation;
  for (std::size_t d = 0; d < od.countries.size(); ++d) {
    double a = 0;
    for (std::size_t o = 0; o < od.countries.size(); ++o)
      if (o != d) a += od.stock[d][o];
    auto it = population.find(od.countries[d]);
    if (it == population.end() || it->second <= 0) {
      t.excluded.push_back(od.countries[d]);
      continue;
    }
    t.rows.push_back({od.countries[d], it->second, a});
  }
  return t;
}

std::vector<CityRecord> load_cities_csv(const std::string& path) {
  auto table = csv::read_file(path);
  if (table.header != std::vector<std::string>{"city", "country_id",
                                               "population", "is_capital"})
    throw std::runtime_error(path + ": unexpected cities.csv header");
  std::vector<CityRecord> cities;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    if (f.size() != 4)
      throw std::runtime_error(path + ": bad row " + std::to_string(i + 2));
    auto pop = csv::parse_double(f[2]);
    if (!pop || *pop <= 0)
      throw std::runtime_error(path + ": bad city population at row " +
                               std::to_string(i + 2));
    bool capital;
    if (f[3] == "1" || f[3] == "true") capital = true;
    else if (f[3] == "0" || f[3] == "false") capital = false;
    else
      throw std::runtime_error(path + ": bad is_capital flag at row " +
                               std::to_string(i + 2));
    cities.push_back({f[0], f[1], *pop, capital});
  }
  return cities;
}

CountryStructure country_structure(const std::vector<CityRecord>& cities,
                                   double threshold) {
  CountryStructure s;
  for (const auto& c : cities) {
    auto& count = s.city_count[c.country_id];  // zero-initialized
    if (c.population > threshold) count += 1;
    if (c.is_capital) {
      auto [it, inserted] = s.capital_population.emplace(c.country_id,
                                                         c.population);
      if (!inserted && c.population > it->second) it->second = c.population;
    }
  }
  return s;
}

AttractivenessTable structure_table(
    const std::map<std::string, double>& values,
    const std::map<std::string, double>& population,
    const std::string& source_label) {
  AttractivenessTable t;
  t.source_label = source_label;
  for (const auto& [country, value] : values) {
    auto it = population.find(country);
    if (it == population.end() || it->second <= 0) {
      t.excluded.push_back(country);
      continue;
    }
    t.rows.push_back({country, it->second, value});
  }
  return t;
}

void write_table_csv(const std::string& path, const AttractivenessTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::string buf = "region_id,population,attractiveness\n";
  for (const auto& row : t.rows)
    csv::write_line(buf, {row.region_id, csv::format_double(row.population),
                          csv::format_double(row.attractiveness)});
  out.write(buf.data(), static_cast<long>(buf.size()));
  if (!out) throw std::runtime_error("write failure: " + path);
}

AttractivenessTable read_table_csv(const std::string& path) {
  auto table = csv::read_file(path);
  if (table.header != std::vector<std::string>{"region_id", "population",
                                               "attractiveness"})
    throw std::runtime_error(path + ": unexpected table header");
  AttractivenessTable t;
  t.source_label = path;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    if (f.size() != 3)
      throw std::runtime_error(path + ": bad row " + std::to_string(i + 2));
    auto p = csv::parse_double(f[1]);
    auto a = csv::parse_double(f[2]);
    if (!p || !a)
      throw std::runtime_error(path + ": non-numeric cell at row " +
                               std::to_string(i + 2));
    t.rows.push_back({f[0], *p, *a});
  }
  return t;
}

std::string table_meta_json(const AttractivenessTable& t) {
  nlohmann::json meta;
  meta["source_label"] = t.source_label;
  meta["excluded"] = t.excluded;
  if (!t.od_orientation.empty()) meta["od_orientation"] = t.od_orientation;
  meta["rows"] = t.rows.size();
  return meta.dump(2) + "\n";
}

}  // namespace geoscale::metrics
