#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "geoscale/metrics.hpp"
#include "geoscale/regions.hpp"

namespace geoscale::synth {

// Deterministic across platforms: mt19937_64 has a pinned sequence and the
// uniform/normal mappings below avoid the implementation-defined library
// distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  double uniform01() {  // in [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {  // Box-Muller, one deviate per call
    double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 gen_;
};

struct SynthTableParams {
  std::uint64_t seed = 1;
  int n_regions = 238;
  double beta_true = 0.64;
  double sigma_pop = 2.3;    // natural-log scale of the population draw
  double noise_sigma = 0.0;  // multiplicative log-normal noise on A
  double prefactor = 1.0;
  double median_pop = 1e6;
};

// Populations are drawn log-normal and rounded to whole persons; the
// attractiveness column is kept real-valued so noise-free tables invert
// exactly.
metrics::AttractivenessTable generate_synthetic(const SynthTableParams& p);

void write_synthetic(const SynthTableParams& p, const std::string& csv_path);

struct SynthWorldParams {
  std::uint64_t seed = 1;
  int n_regions = 238;
  double sigma_pop = 2.3;
  double median_pop = 1e6;
};

// Grid-of-cells world over [-150,150]x[-70,70] with ocean gaps between
// regions. Every 3rd region gets a hole, every 4th an island part, every
// 7th overlaps its right neighbour so the smallest-id tie rule is live.
std::vector<regions::Region> generate_world(const SynthWorldParams& p);

std::vector<geo::LonLat> random_points(std::size_t n, std::uint64_t seed,
                                       double min_lon = -170,
                                       double max_lon = 170,
                                       double min_lat = -85,
                                       double max_lat = 85);

}  // namespace geoscale::synth
