#include "geoscale/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "geoscale/csv.hpp"

namespace geoscale::scaling {

namespace {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation
// (modified Lentz). Accurate to ~1e-14 over the ranges used here.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;

  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_975(int df) {
  if (df < 1) throw std::invalid_argument("t quantile needs df >= 1");
  double nu = df;
  // P(|T| > t) = I_{nu/(nu+t^2)}(nu/2, 1/2) = 0.05; bisect on t
  auto tail2 = [&](double t) { return ibeta(nu / 2.0, 0.5, nu / (nu + t * t)); };
  double lo = 0.0, hi = 1024.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (tail2(mid) > 0.05)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::string to_string(ScalingClass c) {
  switch (c) {
    case ScalingClass::sublinear: return "sublinear";
    case ScalingClass::linear: return "linear";
    case ScalingClass::superlinear: return "superlinear";
  }
  return "";
}

ScalingClass classify(double beta) {
  if (std::abs(beta - 1.0) <= 1e-12) return ScalingClass::linear;
  return beta < 1.0 ? ScalingClass::sublinear : ScalingClass::superlinear;
}

ScalingFit fit_power_law(const metrics::AttractivenessTable& table) {
  std::vector<double> xs, ys;
  int excluded = 0;
  for (const auto& row : table.rows) {
    if (row.attractiveness <= 0 || row.population <= 0) {
      ++excluded;
      continue;
    }
    xs.push_back(std::log10(row.population));
    ys.push_back(std::log10(row.attractiveness));
  }
  const int n = static_cast<int>(xs.size());
  if (n < 2)
    throw std::runtime_error("power-law fit needs at least 2 rows with "
                             "positive population and attractiveness, got " +
                             std::to_string(n));

  double xbar = 0, ybar = 0;
  for (int i = 0; i < n; ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= n;
  ybar /= n;
  double sxx = 0, sxy = 0, sst = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
    sst += (ys[i] - ybar) * (ys[i] - ybar);
  }
  if (sxx == 0.0)
    throw std::runtime_error(
        "power-law fit undefined: no variance in log population");

  ScalingFit fit;
  fit.n = n;
  fit.excluded_zero_rows = excluded;
  fit.beta = sxy / sxx;
  fit.log_a = ybar - fit.beta * xbar;
  double ssr = 0;
  for (int i = 0; i < n; ++i) {
    double e = ys[i] - (fit.log_a + fit.beta * xs[i]);
    ssr += e * e;
  }
  fit.r2 = sst == 0.0 ? 1.0 : 1.0 - ssr / sst;
  if (n >= 3) {
    double se = std::sqrt(ssr / (n - 2) / sxx);
    double t = student_t_975(n - 2);
    fit.se = se;
    fit.ci_low = fit.beta - t * se;
    fit.ci_high = fit.beta + t * se;
  }
  fit.classification = classify(fit.beta);
  return fit;
}

std::string ScalingFit::to_json() const {
  std::string out = "{\n";
  auto field = [&out](const char* k, const std::string& v, bool last = false) {
    out += "  \"";
    out += k;
    out += "\": ";
    out += v;
    out += last ? "\n" : ",\n";
  };
  field("beta", csv::format_double(beta));
  field("log_a", csv::format_double(log_a));
  field("ci_low", ci_low ? csv::format_double(*ci_low) : "null");
  field("ci_high", ci_high ? csv::format_double(*ci_high) : "null");
  field("r2", csv::format_double(r2));
  field("n", std::to_string(n));
  field("classification", "\"" + to_string(classification) + "\"");
  field("excluded_zero_rows", std::to_string(excluded_zero_rows), true);
  out += "}\n";
  return out;
}

LogNormalFit fit_lognormal(std::span<const double> values) {
  if (values.size() < 2)
    throw std::runtime_error("log-normal fit needs at least 2 values");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!(values[i] > 0))
      throw std::runtime_error("log-normal fit: non-positive value at index " +
                               std::to_string(i));
  LogNormalFit fit;
  fit.n = static_cast<int>(values.size());
  double sum = 0;
  for (double v : values) sum += std::log(v);
  fit.mu = sum / fit.n;
  double ss = 0;
  for (double v : values) {
    double d = std::log(v) - fit.mu;
    ss += d * d;
  }
  fit.sigma = std::sqrt(ss / (fit.n - 1));
  return fit;
}

std::vector<ResidualRow> residuals(const metrics::AttractivenessTable& table,
                                   const ScalingFit& fit) {
  std::vector<ResidualRow> rows;
  for (const auto& row : table.rows) {
    if (row.attractiveness <= 0 || row.population <= 0) continue;
    double expected = fit.log_a + fit.beta * std::log10(row.population);
    rows.push_back({row.region_id, std::log10(row.attractiveness) - expected});
  }
  std::sort(rows.begin(), rows.end(),
            [](const ResidualRow& a, const ResidualRow& b) {
              if (a.residual != b.residual) return a.residual > b.residual;
              return a.region_id < b.region_id;
            });
  return rows;
}

std::vector<HistRow> histogram_lognormal(std::span<const double> values,
                                         int bins) {
  if (bins < 2) throw std::runtime_error("histogram needs at least 2 bins");
  LogNormalFit fit = fit_lognormal(values);

  double lo = std::log(*std::min_element(values.begin(), values.end()));
  double hi = std::log(*std::max_element(values.begin(), values.end()));
  if (lo == hi) {
    // degenerate sample: widen so all mass lands in one interior bin
    lo -= 0.5;
    hi += 0.5;
  }
  double width = (hi - lo) / bins;

  std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    int b = static_cast<int>((std::log(v) - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }

  const double inv_norm = 1.0 / (static_cast<double>(values.size()) * width);
  std::vector<HistRow> rows;
  rows.reserve(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    double center = lo + (b + 0.5) * width;
    double z = (center - fit.mu) / fit.sigma;
    double fitted = fit.sigma > 0
                        ? std::exp(-0.5 * z * z) /
                              (fit.sigma * std::sqrt(2.0 * M_PI))
                        : 0.0;
    rows.push_back({std::exp(center),
                    static_cast<double>(counts[static_cast<std::size_t>(b)]) *
                        inv_norm,
                    fitted});
  }
  return rows;
}

void write_residuals_csv(const std::string& path,
                         const std::vector<ResidualRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::string buf = "region_id,residual\n";
  for (const auto& r : rows)
    csv::write_line(buf, {r.region_id, csv::format_double(r.residual)});
  out.write(buf.data(), static_cast<long>(buf.size()));
  if (!out) throw std::runtime_error("write failure: " + path);
}

void write_hist_csv(const std::string& path, const std::vector<HistRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::string buf = "bin_center,empirical_density,fitted_density\n";
  for (const auto& r : rows)
    csv::write_line(buf, {csv::format_double(r.bin_center),
                          csv::format_double(r.empirical_density),
                          csv::format_double(r.fitted_density)});
  out.write(buf.data(), static_cast<long>(buf.size()));
  if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace geoscale::scaling
