#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geoscale/metrics.hpp"

namespace geoscale::scaling {

enum class ScalingClass { sublinear, linear, superlinear };

std::string to_string(ScalingClass c);

// Trichotomy against 1; |beta - 1| <= 1e-12 counts as linear.
ScalingClass classify(double beta);

struct ScalingFit {
  double beta = 0;   // slope of log10 A on log10 p
  double log_a = 0;  // intercept, base-10 log of the prefactor
  double r2 = 0;
  int n = 0;
  std::optional<double> se;       // slope standard error, needs n >= 3
  std::optional<double> ci_low;   // 95% t-interval bounds, need n >= 3
  std::optional<double> ci_high;
  ScalingClass classification = ScalingClass::linear;
  int excluded_zero_rows = 0;

  std::string to_json() const;
};

// Unweighted OLS on the log10 scale. Rows with A = 0 are excluded and
// counted; throws below 2 usable rows or when log p has no variance.
// With exactly 2 rows the line is exact and no CI is reported.
ScalingFit fit_power_law(const metrics::AttractivenessTable& table);

struct LogNormalFit {
  double mu = 0;     // mean of natural-log values
  double sigma = 0;  // sample (n-1) standard deviation of natural logs
  int n = 0;
};

// Moment fit on the natural logs; throws on any non-positive value,
// naming its index, and below 2 values.
LogNormalFit fit_lognormal(std::span<const double> values);

struct ResidualRow {
  std::string region_id;
  double residual = 0;  // log10 observed - log10 expected
};

// Rows that entered the fit, sorted by residual descending (ties by id).
std::vector<ResidualRow> residuals(const metrics::AttractivenessTable& table,
                                   const ScalingFit& fit);

struct HistRow {
  double bin_center = 0;         // geometric bin center, value scale
  double empirical_density = 0;  // per unit of ln(value)
  double fitted_density = 0;     // normal pdf of the LogNormalFit
};

// Log-spaced histogram; empirical densities integrate to 1 over ln-space.
std::vector<HistRow> histogram_lognormal(std::span<const double> values,
                                         int bins);

// Two-sided 95% Student-t critical value, via the regularized incomplete
// beta function.
double student_t_975(int df);

void write_residuals_csv(const std::string& path,
                         const std::vector<ResidualRow>& rows);
void write_hist_csv(const std::string& path, const std::vector<HistRow>& rows);

}  // namespace geoscale::scaling
