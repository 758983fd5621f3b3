#include "geoscale/geometry.hpp"

namespace geoscale::geo {

Box ring_box(const Ring& r) {
  Box b;
  for (auto p : r) b.expand(p);
  return b;
}

bool point_on_ring(LonLat p, const Ring& r) {
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    LonLat a = r[i], b = r[i + 1];
    double minx = a.lon < b.lon ? a.lon : b.lon;
    double maxx = a.lon < b.lon ? b.lon : a.lon;
    double miny = a.lat < b.lat ? a.lat : b.lat;
    double maxy = a.lat < b.lat ? b.lat : a.lat;
    if (p.lon < minx || p.lon > maxx || p.lat < miny || p.lat > maxy) continue;
    double cross =
        (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
    if (cross == 0.0) return true;
  }
  return false;
}

bool ring_parity_odd(LonLat p, const Ring& r) {
  bool odd = false;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    LonLat a = r[i], b = r[i + 1];
    if ((a.lat > p.lat) == (b.lat > p.lat)) continue;
    // cross-multiplied form of the crossing-x comparison, avoids division
    double t = (p.lat - a.lat) * (b.lon - a.lon) -
               (p.lon - a.lon) * (b.lat - a.lat);
    if (b.lat > a.lat ? t > 0 : t < 0) odd = !odd;
  }
  return odd;
}

bool part_contains(LonLat p, const PolygonPart& part) {
  if (point_on_ring(p, part.exterior)) return true;
  if (!ring_parity_odd(p, part.exterior)) return false;
  for (const auto& hole : part.holes) {
    if (point_on_ring(p, hole)) return true;  // hole rim is region boundary
    if (ring_parity_odd(p, hole)) return false;
  }
  return true;
}

bool multipolygon_contains(LonLat p, const MultiPolygon& mp) {
  for (const auto& part : mp)
    if (part_contains(p, part)) return true;
  return false;
}

}  // namespace geoscale::geo
