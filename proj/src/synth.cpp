#include "geoscale/synth.hpp"

#include <cmath>
#include <cstdio>

#include "geoscale/csv.hpp"

namespace geoscale::synth {

namespace {

std::string padded_id(const char* prefix, int i, int n) {
  int width = 1;
  for (int v = n - 1; v >= 10; v /= 10) ++width;
  if (width > 9) width = 9;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4s%0*d", prefix, width, i);
  return buf;
}

}  // namespace

metrics::AttractivenessTable generate_synthetic(const SynthTableParams& p) {
  Rng rng(p.seed);
  metrics::AttractivenessTable t;
  t.source_label = "synthetic";
  double mu_pop = std::log(p.median_pop);
  for (int i = 0; i < p.n_regions; ++i) {
    double pop = std::round(std::exp(mu_pop + p.sigma_pop * rng.normal()));
    if (pop < 1) pop = 1;
    double noise =
        p.noise_sigma > 0 ? std::exp(p.noise_sigma * rng.normal()) : 1.0;
    double a = p.prefactor * std::pow(pop, p.beta_true) * noise;
    t.rows.push_back({padded_id("S", i, p.n_regions), pop, a});
  }
  return t;
}

void write_synthetic(const SynthTableParams& p, const std::string& csv_path) {
  metrics::write_table_csv(csv_path, generate_synthetic(p));
}

std::vector<regions::Region> generate_world(const SynthWorldParams& p) {
  Rng rng(p.seed);
  const double west = -150, east = 150, south = -70, north = 70;
  int cols = static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(p.n_regions) * 2.0)));
  int rows = (p.n_regions + cols - 1) / cols;
  double cw = (east - west) / cols;
  double ch = (north - south) / rows;
  double margin = 0.12 * std::min(cw, ch);

  std::vector<regions::Region> out;
  out.reserve(static_cast<std::size_t>(p.n_regions));
  double mu_pop = std::log(p.median_pop);

  for (int k = 0; k < p.n_regions; ++k) {
    int r = k / cols, c = k % cols;
    double x0 = west + c * cw + margin;
    double x1 = west + (c + 1) * cw - margin;
    double y0 = south + r * ch + margin;
    double y1 = south + (r + 1) * ch - margin;
    if (k % 7 == 3 && c + 1 < cols) x1 += 2.2 * margin;  // overlaps neighbour

    // octagon: axis-aligned rectangle with cut corners
    double cut = 0.25 * std::min(x1 - x0, y1 - y0);
    geo::Ring ring = {
        {x0 + cut, y0}, {x1 - cut, y0}, {x1, y0 + cut}, {x1, y1 - cut},
        {x1 - cut, y1}, {x0 + cut, y1}, {x0, y1 - cut}, {x0, y0 + cut},
        {x0 + cut, y0}};
    geo::PolygonPart main_part;
    main_part.exterior = std::move(ring);

    if (k % 3 == 0) {
      double hx0 = x0 + 0.4 * (x1 - x0), hx1 = x0 + 0.6 * (x1 - x0);
      double hy0 = y0 + 0.4 * (y1 - y0), hy1 = y0 + 0.6 * (y1 - y0);
      main_part.holes.push_back(
          {{hx0, hy0}, {hx1, hy0}, {hx1, hy1}, {hx0, hy1}, {hx0, hy0}});
    }

    regions::Region region;
    region.region_id = padded_id("R", k, p.n_regions);
    region.name = "region " + std::to_string(k);
    region.country_id = region.region_id;
    region.geometry.push_back(std::move(main_part));

    if (k % 4 == 1) {
      // small island in the cell's margin strip, below the main polygon
      double ix0 = x0 + 0.1 * (x1 - x0), ix1 = x0 + 0.25 * (x1 - x0);
      double iy1 = y0 - 0.15 * margin, iy0 = y0 - 0.85 * margin;
      geo::PolygonPart island;
      island.exterior = {{ix0, iy0}, {ix1, iy0}, {ix1, iy1}, {ix0, iy1},
                         {ix0, iy0}};
      region.geometry.push_back(std::move(island));
    }

    double pop = std::round(std::exp(mu_pop + p.sigma_pop * rng.normal()));
    region.population = pop < 1 ? 1 : pop;
    out.push_back(std::move(region));
  }
  return out;
}

std::vector<geo::LonLat> random_points(std::size_t n, std::uint64_t seed,
                                       double min_lon, double max_lon,
                                       double min_lat, double max_lat) {
  Rng rng(seed);
  std::vector<geo::LonLat> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back({rng.uniform(min_lon, max_lon),
                   rng.uniform(min_lat, max_lat)});
  return pts;
}

}  // namespace geoscale::synth
