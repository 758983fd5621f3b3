#include "geoscale/home.hpp"

#include <omp.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "geoscale/csv.hpp"

namespace geoscale::home {

namespace {

struct Activity {
  std::int64_t objects = 0;
  std::set<std::uint32_t> dates;
};

// user -> country index -> activity
using PartialMap =
    std::unordered_map<std::string, std::map<std::uint32_t, Activity>>;

void merge_into(PartialMap& into, PartialMap& from) {
  for (auto& [user, per_country] : from) {
    auto& dst = into[user];
    for (auto& [cidx, act] : per_country) {
      auto& d = dst[cidx];
      d.objects += act.objects;
      d.dates.merge(act.dates);
    }
  }
}

std::vector<UserProfile> finalize(PartialMap& acc,
                                  const regions::RegionSet& rs) {
  std::vector<UserProfile> profiles;
  profiles.reserve(acc.size());
  for (auto& [user, per_country] : acc) {
    UserProfile p;
    p.user_id = user;
    for (auto& [cidx, act] : per_country)
      p.per_country.push_back({rs.countries()[cidx], act.objects,
                               static_cast<std::int64_t>(act.dates.size())});
    profiles.push_back(std::move(p));
  }
  std::sort(profiles.begin(), profiles.end(),
            [](const UserProfile& a, const UserProfile& b) {
              return a.user_id < b.user_id;
            });
  return profiles;
}

}  // namespace

std::vector<UserProfile> accumulate(const std::vector<assign::AssignedRow>& rows,
                                    const regions::RegionSet& rs,
                                    int threads) {
  int nthreads = threads > 0 ? threads : omp_get_max_threads();
  if (nthreads == 1 || rows.size() < 4096) {
    PartialMap acc;
    for (const auto& row : rows) {
      if (!row.region) continue;
      auto& act = acc[row.user_id][rs.country_index(*row.region)];
      ++act.objects;
      act.dates.insert(row.date_key);
    }
    return finalize(acc, rs);
  }

  // partial maps per thread, merged pairwise; merge order cannot change
  // the result because counts are sums and dates are sets
  std::vector<PartialMap> partials(static_cast<std::size_t>(nthreads));
  auto n = static_cast<std::int64_t>(rows.size());
#pragma omp parallel num_threads(nthreads)
  {
    auto& local = partials[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (!row.region) continue;
      auto& act = local[row.user_id][rs.country_index(*row.region)];
      ++act.objects;
      act.dates.insert(row.date_key);
    }
  }
  PartialMap acc;
  for (auto& part : partials) merge_into(acc, part);
  return finalize(acc, rs);
}

std::optional<std::string> infer_home(const UserProfile& profile) {
  if (profile.per_country.empty()) return std::nullopt;
  const CountryActivity* best_objects = nullptr;
  const CountryActivity* best_days = nullptr;
  bool objects_tied = false, days_tied = false;
  for (const auto& c : profile.per_country) {
    if (!best_objects || c.objects > best_objects->objects) {
      best_objects = &c;
      objects_tied = false;
    } else if (c.objects == best_objects->objects) {
      objects_tied = true;
    }
    if (!best_days || c.active_days > best_days->active_days) {
      best_days = &c;
      days_tied = false;
    } else if (c.active_days == best_days->active_days) {
      days_tied = true;
    }
  }
  if (objects_tied || days_tied) return std::nullopt;
  if (best_objects->country_id != best_days->country_id) return std::nullopt;
  return best_objects->country_id;
}

HomeMap infer_homes(const std::vector<UserProfile>& profiles) {
  HomeMap homes;
  for (const auto& p : profiles) homes.emplace(p.user_id, infer_home(p));
  return homes;
}

CoverageStats coverage_stats(const std::vector<UserProfile>& profiles,
                             const HomeMap& homes) {
  std::int64_t total = 0, defined = 0, foreign = 0;
  for (const auto& p : profiles) {
    std::int64_t user_total = p.total_objects();
    total += user_total;
    auto it = homes.find(p.user_id);
    if (it == homes.end() || !it->second) continue;
    defined += user_total;
    for (const auto& c : p.per_country)
      if (c.country_id != *it->second) foreign += c.objects;
  }
  CoverageStats s;
  if (total > 0) {
    s.defined_home_fraction = static_cast<double>(defined) / static_cast<double>(total);
    s.foreign_fraction = static_cast<double>(foreign) / static_cast<double>(total);
  }
  return s;
}

void write_homes_csv(const std::string& path, const HomeMap& homes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::string buf = "user_id,home_country\n";
  for (const auto& [user, country] : homes)
    csv::write_line(buf, {user, country ? *country : ""});
  out.write(buf.data(), static_cast<long>(buf.size()));
  if (!out) throw std::runtime_error("write failure: " + path);
}

HomeMap read_homes_csv(const std::string& path) {
  auto table = csv::read_file(path);
  if (table.header != std::vector<std::string>{"user_id", "home_country"})
    throw std::runtime_error(path + ": unexpected homes.csv header");
  HomeMap homes;
  for (const auto& f : table.rows) {
    if (f.size() != 2)
      throw std::runtime_error(path + ": bad homes.csv row");
    homes.emplace(f[0], f[1].empty() ? std::nullopt
                                     : std::optional<std::string>(f[1]));
  }
  return homes;
}

std::string coverage_to_json(const CoverageStats& s) {
  std::string out = "{\n  \"defined_home_fraction\": ";
  out += csv::format_double(s.defined_home_fraction);
  out += ",\n  \"foreign_fraction\": ";
  out += csv::format_double(s.foreign_fraction);
  out += "\n}\n";
  return out;
}

}  // namespace geoscale::home
