#include "geoscale/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "geoscale/assign.hpp"
#include "geoscale/csv.hpp"
#include "geoscale/home.hpp"
#include "geoscale/metrics.hpp"
#include "geoscale/scaling.hpp"
#include "geoscale/sha256.hpp"

namespace geoscale::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(text.data(), static_cast<long>(text.size()));
  if (!out) throw std::runtime_error("write failure: " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

ingest::PruneStats stage_ingest(const std::string& input,
                                const std::string& schema_spec,
                                const std::string& out_records,
                                const std::string& out_stats, int threads) {
  return with_stage("ingest", [&] {
    auto schema = ingest::ColumnSchema::parse(schema_spec);
    io::LineReader reader(input);
    std::vector<ingest::MediaRecord> records;
    auto stats = ingest::prune_to_vector(reader, schema, records, threads);
    if (out_records.ends_with(".bin"))
      ingest::write_records_binary(out_records, records);
    else
      ingest::write_records_csv(out_records, records);
    if (!out_stats.empty()) write_text(out_stats, stats.to_json());
    return stats;
  });
}

void stage_assign(const std::string& records_path,
                  const std::string& regions_path, const std::string& pop_path,
                  const std::string& out_csv, int threads) {
  with_stage("assign", [&] {
    auto pop = regions::load_population_csv(pop_path);
    auto rs = regions::load_regions(regions_path, pop);
    auto records = ingest::read_records(records_path);
    spatial::SpatialIndex index(rs);
    auto assigned = assign::assign_batch(records, index, threads);
    assign::write_assigned_csv(out_csv, assigned, rs);
  });
}

void stage_homes(const std::string& assigned_path,
                 const std::string& regions_path, const std::string& out_csv,
                 const std::string& out_stats, int threads) {
  with_stage("homes", [&] {
    auto rs = regions::load_regions(regions_path, {});
    auto rows = assign::read_assigned_csv(assigned_path, rs);
    auto profiles = home::accumulate(rows, rs, threads);
    auto homes = home::infer_homes(profiles);
    home::write_homes_csv(out_csv, homes);
    if (!out_stats.empty()) {
      auto stats = home::coverage_stats(profiles, homes);
      write_text(out_stats, home::coverage_to_json(stats));
    }
  });
}

void stage_attract_flickr(const std::string& assigned_path,
                          const std::string& homes_path,
                          const std::string& regions_path,
                          const std::string& pop_path,
                          const std::string& out_table,
                          const std::string& out_meta) {
  with_stage("attract", [&] {
    auto pop = regions::load_population_csv(pop_path);
    auto rs = regions::load_regions(regions_path, pop);
    auto rows = assign::read_assigned_csv(assigned_path, rs);
    auto homes = home::read_homes_csv(homes_path);
    auto table = metrics::flickr_attractiveness(rows, homes, rs);
    metrics::write_table_csv(out_table, table);
    if (!out_meta.empty()) write_text(out_meta, metrics::table_meta_json(table));
  });
}

void stage_attract_migration(const std::string& od_path,
                             const std::string& pop_path,
                             const std::string& out_table,
                             const std::string& out_meta) {
  with_stage("attract", [&] {
    auto od = metrics::load_od_matrix(od_path);
    auto pop = regions::load_population_csv(pop_path);
    auto table = metrics::migration_attractiveness(od, pop);
    metrics::write_table_csv(out_table, table);
    if (!out_meta.empty()) write_text(out_meta, metrics::table_meta_json(table));
  });
}

void stage_attract_cities(const std::string& cities_path,
                          const std::string& pop_path, double threshold,
                          const std::string& out_table,
                          const std::string& out_meta,
                          const std::string& capital_table,
                          const std::string& capital_meta) {
  with_stage("attract", [&] {
    auto cities = metrics::load_cities_csv(cities_path);
    auto pop = regions::load_population_csv(pop_path);
    auto structure = metrics::country_structure(cities, threshold);
    auto counts = metrics::structure_table(structure.city_count, pop,
                                           "city_count");
    metrics::write_table_csv(out_table, counts);
    if (!out_meta.empty())
      write_text(out_meta, metrics::table_meta_json(counts));
    if (!capital_table.empty()) {
      auto capitals = metrics::structure_table(structure.capital_population,
                                               pop, "capital_population");
      metrics::write_table_csv(capital_table, capitals);
      if (!capital_meta.empty())
        write_text(capital_meta, metrics::table_meta_json(capitals));
    }
  });
}

void stage_fit(const std::string& table_path, const std::string& out_fit,
               const std::string& out_residuals) {
  with_stage("fit", [&] {
    auto table = metrics::read_table_csv(table_path);
    auto fit = scaling::fit_power_law(table);
    write_text(out_fit, fit.to_json());
    if (!out_residuals.empty())
      scaling::write_residuals_csv(out_residuals,
                                   scaling::residuals(table, fit));
  });
}

void stage_dist(const std::string& values_path, int column, int bins,
                const std::string& out_hist, const std::string& fit_out) {
  with_stage("dist", [&] {
    std::ifstream in(values_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + values_path);
    std::vector<double> values;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto fields = csv::split_line(line);
      if (column < 0 || static_cast<std::size_t>(column) >= fields.size())
        throw std::runtime_error(values_path + ": no column " +
                                 std::to_string(column) + " at line " +
                                 std::to_string(lineno));
      auto v = csv::parse_double(fields[static_cast<std::size_t>(column)]);
      if (!v) {
        if (lineno == 1) continue;  // header
        throw std::runtime_error(values_path + ": non-numeric value at line " +
                                 std::to_string(lineno));
      }
      values.push_back(*v);
    }
    auto rows = scaling::histogram_lognormal(values, bins);
    scaling::write_hist_csv(out_hist, rows);
    if (!fit_out.empty()) {
      auto fit = scaling::fit_lognormal(values);
      json j = {{"mu", fit.mu},
                {"sigma", fit.sigma},
                {"n", fit.n},
                {"method", "moments_of_logs"}};
      write_text(fit_out, j.dump(2) + "\n");
    }
  });
}

namespace {

struct ManifestBuilder {
  json inputs = json::array();
  json outputs = json::array();

  void add_input(const std::string& path) {
    if (path.empty()) return;
    std::string text = read_text(path);
    inputs.push_back({{"path", path},
                      {"sha256", util::sha256_hex(text)},
                      {"bytes", text.size()}});
  }

  // rel is the path inside outdir, recorded relative so reruns into any
  // directory stay byte-identical
  void add_output(const fs::path& outdir, const std::string& rel) {
    std::string text = read_text((outdir / rel).string());
    std::size_t rows = 0;
    if (rel.ends_with(".csv")) {
      for (char c : text) rows += c == '\n';
      if (rows > 0) --rows;  // header
    }
    json entry = {{"path", rel},
                  {"sha256", util::sha256_hex(text)},
                  {"bytes", text.size()}};
    if (rel.ends_with(".csv")) entry["rows"] = rows;
    outputs.push_back(std::move(entry));
  }

  json manifest(const PipelineConfig& config, const std::string& status,
                const std::string& failed_stage) const {
    json m;
    m["tool"] = "geoscale";
    m["version"] = kToolVersion;
    m["status"] = status;
    if (!failed_stage.empty()) m["failed_stage"] = failed_stage;
    m["config"] = {{"schema", config.schema},
                   {"records_format", config.records_format}};
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    return m;
  }
};

}  // namespace

RunResult run_pipeline(const PipelineConfig& config) {
  if (config.outdir.empty())
    throw StageError("setup", "output directory not set");
  fs::create_directories(config.outdir);
  fs::path outdir(config.outdir);

  ManifestBuilder mb;
  mb.add_input(config.input);

  RunResult result;
  auto out = [&](const std::string& rel) { return (outdir / rel).string(); };
  auto done = [&](const std::string& rel) {
    mb.add_output(outdir, rel);
    result.outputs.push_back(rel);
  };

  std::string records_file =
      config.records_format == "bin" ? "records.bin" : "records.csv";

  try {
    stage_ingest(config.input, config.schema, out(records_file),
                 out("ingest_stats.json"), config.threads);
    done(records_file);
    done("ingest_stats.json");

    stage_assign(out(records_file), config.regions, config.populations,
                 out("assigned.csv"), config.threads);
    // digest the shared inputs once the stage proved them readable
    mb.add_input(config.regions);
    mb.add_input(config.populations);
    done("assigned.csv");

    stage_homes(out("assigned.csv"), config.regions, out("homes.csv"),
                out("homes_stats.json"), config.threads);
    done("homes.csv");
    done("homes_stats.json");

    stage_attract_flickr(out("assigned.csv"), out("homes.csv"), config.regions,
                         config.populations, out("attractiveness.csv"),
                         out("attractiveness.meta.json"));
    done("attractiveness.csv");
    done("attractiveness.meta.json");

    stage_fit(out("attractiveness.csv"), out("fit.json"),
              out("residuals.csv"));
    done("fit.json");
    done("residuals.csv");

    if (!config.od_matrix.empty()) {
      stage_attract_migration(config.od_matrix, config.populations,
                              out("migration.csv"),
                              out("migration.meta.json"));
      mb.add_input(config.od_matrix);
      done("migration.csv");
      done("migration.meta.json");
      stage_fit(out("migration.csv"), out("migration_fit.json"),
                out("migration_residuals.csv"));
      done("migration_fit.json");
      done("migration_residuals.csv");
    }

    if (!config.cities.empty()) {
      stage_attract_cities(config.cities, config.populations,
                           config.city_threshold, out("city_count.csv"),
                           out("city_count.meta.json"),
                           out("capital_population.csv"),
                           out("capital_population.meta.json"));
      mb.add_input(config.cities);
      done("city_count.csv");
      done("city_count.meta.json");
      done("capital_population.csv");
      done("capital_population.meta.json");
      stage_fit(out("city_count.csv"), out("city_count_fit.json"),
                out("city_count_residuals.csv"));
      done("city_count_fit.json");
      done("city_count_residuals.csv");
      stage_fit(out("capital_population.csv"),
                out("capital_population_fit.json"),
                out("capital_population_residuals.csv"));
      done("capital_population_fit.json");
      done("capital_population_residuals.csv");
    }
  } catch (const StageError& e) {
    json m = mb.manifest(config, "incomplete", e.stage);
    write_text(out("manifest.json"), m.dump(2) + "\n");
    throw;
  } catch (const std::exception& e) {
    json m = mb.manifest(config, "incomplete", "run");
    write_text(out("manifest.json"), m.dump(2) + "\n");
    throw StageError("run", e.what());
  }

  json m = mb.manifest(config, "complete", "");
  write_text(out("manifest.json"), m.dump(2) + "\n");
  result.manifest_path = out("manifest.json");
  return result;
}

}  // namespace geoscale::pipeline
