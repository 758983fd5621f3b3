#pragma once

#include <limits>
#include <vector>

namespace geoscale::geo {

struct LonLat {
  double lon = 0;
  double lat = 0;

  bool operator==(const LonLat&) const = default;
};

// Closed vertex loop: front() == back(), at least 4 vertices.
using Ring = std::vector<LonLat>;

struct PolygonPart {
  Ring exterior;
  std::vector<Ring> holes;
};

using MultiPolygon = std::vector<PolygonPart>;

struct Box {
  double min_lon = std::numeric_limits<double>::infinity();
  double min_lat = std::numeric_limits<double>::infinity();
  double max_lon = -std::numeric_limits<double>::infinity();
  double max_lat = -std::numeric_limits<double>::infinity();

  void expand(LonLat p) {
    if (p.lon < min_lon) min_lon = p.lon;
    if (p.lat < min_lat) min_lat = p.lat;
    if (p.lon > max_lon) max_lon = p.lon;
    if (p.lat > max_lat) max_lat = p.lat;
  }
  void expand(const Box& b) {
    if (b.min_lon < min_lon) min_lon = b.min_lon;
    if (b.min_lat < min_lat) min_lat = b.min_lat;
    if (b.max_lon > max_lon) max_lon = b.max_lon;
    if (b.max_lat > max_lat) max_lat = b.max_lat;
  }
  bool contains(LonLat p) const {
    return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat &&
           p.lat <= max_lat;
  }
};

Box ring_box(const Ring& r);

bool point_on_ring(LonLat p, const Ring& r);

// Even-odd crossing parity of a ray cast from p. Boundary points give an
// arbitrary parity here; callers must test point_on_ring first.
bool ring_parity_odd(LonLat p, const Ring& r);

// Boundary-inclusive even-odd containment: on any ring = inside; strictly
// inside a hole = outside.
bool part_contains(LonLat p, const PolygonPart& part);
bool multipolygon_contains(LonLat p, const MultiPolygon& mp);

}  // namespace geoscale::geo
