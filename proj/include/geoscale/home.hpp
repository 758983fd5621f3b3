#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoscale/assign.hpp"
#include "geoscale/regions.hpp"

namespace geoscale::home {

struct CountryActivity {
  std::string country_id;
  std::int64_t objects = 0;
  std::int64_t active_days = 0;  // distinct UTC calendar dates
};

struct UserProfile {
  std::string user_id;
  std::vector<CountryActivity> per_country;  // sorted by country_id

  std::int64_t total_objects() const {
    std::int64_t n = 0;
    for (const auto& c : per_country) n += c.objects;
    return n;
  }
};

// Per-user per-country activity. State-level regions roll up to their
// country; unassigned rows contribute nothing. Order-independent: any
// permutation of rows gives the same profiles. Profiles come back sorted
// by user_id.
std::vector<UserProfile> accumulate(const std::vector<assign::AssignedRow>& rows,
                                    const regions::RegionSet& rs,
                                    int threads = 1);

// Home country: the unique argmax of object count that is also the unique
// argmax of active days. Any tie or disagreement leaves it undefined.
std::optional<std::string> infer_home(const UserProfile& profile);

using HomeMap = std::map<std::string, std::optional<std::string>>;

HomeMap infer_homes(const std::vector<UserProfile>& profiles);

struct CoverageStats {
  double defined_home_fraction = 0;  // of objects, by users with a home
  double foreign_fraction = 0;       // of objects, taken outside the home
};

CoverageStats coverage_stats(const std::vector<UserProfile>& profiles,
                             const HomeMap& homes);

// homes.csv: user_id,home_country with an empty cell for undefined
void write_homes_csv(const std::string& path, const HomeMap& homes);
HomeMap read_homes_csv(const std::string& path);
std::string coverage_to_json(const CoverageStats& s);

}  // namespace geoscale::home
