#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoscale/ingest.hpp"

namespace geoscale::pipeline {

// Stage failures carry the stage name so the CLI can report it and exit 2.
struct StageError : std::runtime_error {
  std::string stage;
  StageError(std::string stage_name, const std::string& what)
      : std::runtime_error(what), stage(std::move(stage_name)) {}
};

struct PipelineConfig {
  std::string input;       // raw tsv(.gz)
  std::string regions;     // GeoJSON
  std::string populations; // region_id,population csv
  std::string schema = "0,1,2,3,4";
  std::string od_matrix;   // optional: adds the migration table + fit
  std::string cities;      // optional: adds the country-structure tables
  double city_threshold = 300000;
  std::string outdir;
  std::string records_format = "csv";  // or "bin"
  int threads = 1;
};

// File-level stage entry points. Each one is exactly what the matching CLI
// subcommand runs, so a stage rerun on the previous stage's files matches
// the one-shot pipeline byte for byte.
ingest::PruneStats stage_ingest(const std::string& input,
                                const std::string& schema_spec,
                                const std::string& out_records,
                                const std::string& out_stats, int threads);

void stage_assign(const std::string& records_path,
                  const std::string& regions_path, const std::string& pop_path,
                  const std::string& out_csv, int threads);

void stage_homes(const std::string& assigned_path,
                 const std::string& regions_path, const std::string& out_csv,
                 const std::string& out_stats, int threads);

void stage_attract_flickr(const std::string& assigned_path,
                          const std::string& homes_path,
                          const std::string& regions_path,
                          const std::string& pop_path,
                          const std::string& out_table,
                          const std::string& out_meta);

void stage_attract_migration(const std::string& od_path,
                             const std::string& pop_path,
                             const std::string& out_table,
                             const std::string& out_meta);

void stage_attract_cities(const std::string& cities_path,
                          const std::string& pop_path, double threshold,
                          const std::string& out_table,
                          const std::string& out_meta,
                          const std::string& capital_table,
                          const std::string& capital_meta);

void stage_fit(const std::string& table_path, const std::string& out_fit,
               const std::string& out_residuals);

void stage_dist(const std::string& values_path, int column, int bins,
                const std::string& out_hist, const std::string& fit_out);

struct RunResult {
  std::vector<std::string> outputs;  // relative to outdir
  std::string manifest_path;
};

// ingest -> assign -> homes -> attract -> fit -> residuals, writing every
// intermediate plus manifest.json. On a stage failure the manifest is
// written with status "incomplete" and the failing stage before the
// StageError propagates.
RunResult run_pipeline(const PipelineConfig& config);

}  // namespace geoscale::pipeline
