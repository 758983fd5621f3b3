#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "geoscale/csv.hpp"
#include "geoscale/pipeline.hpp"
#include "geoscale/regions.hpp"
#include "geoscale/synth.hpp"

namespace {

std::string default_stats_path(const std::string& out, const char* suffix) {
  auto dot = out.rfind('.');
  std::string stem = dot == std::string::npos ? out : out.substr(0, dot);
  return stem + suffix;
}

std::string trim(std::string s) {
  auto issp = [](char c) { return c == ' ' || c == '\t'; };
  while (!s.empty() && issp(s.front())) s.erase(s.begin());
  while (!s.empty() && issp(s.back())) s.pop_back();
  return s;
}

// key=value lines, '#' comments; keys mirror the run flags
std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ": config line without '=': " + line);
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geoscale: attractiveness scaling over geo-tagged activity"};
  app.require_subcommand(1);

  // ingest
  std::string in_input, in_schema = "0,1,2,3,4", in_out, in_stats;
  int in_threads = 1;
  auto* ingest_cmd =
      app.add_subcommand("ingest", "prune raw tab-separated media metadata");
  ingest_cmd->add_option("--input", in_input, "tsv or tsv.gz input")
      ->required();
  ingest_cmd->add_option("--schema", in_schema,
                         "column indices object_id,user_id,taken_at,lon,lat"
                         "[,width] or named key=index list");
  ingest_cmd->add_option("--out", in_out, "records file (.csv or .bin)")
      ->required();
  ingest_cmd->add_option("--stats", in_stats, "prune stats json");
  ingest_cmd->add_option("--threads", in_threads, "worker cap (0 = auto)");

  // assign
  std::string as_records, as_regions, as_pop, as_out;
  int as_threads = 1;
  auto* assign_cmd =
      app.add_subcommand("assign", "reverse-geocode records to regions");
  assign_cmd->add_option("--records", as_records, "records file from ingest")
      ->required();
  assign_cmd->add_option("--regions", as_regions, "GeoJSON FeatureCollection")
      ->required();
  assign_cmd->add_option("--pop", as_pop, "region_id,population csv")
      ->required();
  assign_cmd->add_option("--out", as_out, "assigned csv")->required();
  assign_cmd->add_option("--threads", as_threads, "worker cap (0 = auto)");

  // homes
  std::string ho_assigned, ho_regions, ho_out, ho_stats;
  int ho_threads = 1;
  auto* homes_cmd =
      app.add_subcommand("homes", "infer per-user home countries");
  homes_cmd->add_option("--assigned", ho_assigned, "assigned csv")->required();
  homes_cmd->add_option("--regions", ho_regions, "GeoJSON FeatureCollection")
      ->required();
  homes_cmd->add_option("--out", ho_out, "homes csv")->required();
  homes_cmd->add_option("--stats", ho_stats, "coverage stats json");
  homes_cmd->add_option("--threads", ho_threads, "worker cap (0 = auto)");

  // attract
  std::string at_mode, at_assigned, at_homes, at_regions, at_pop, at_od,
      at_cities, at_out, at_meta, at_capital_out, at_capital_meta;
  double at_threshold = 300000;
  auto* attract_cmd =
      app.add_subcommand("attract", "build attractiveness tables");
  attract_cmd
      ->add_option("--mode", at_mode, "flickr, migration or cities")
      ->required()
      ->check(CLI::IsMember({"flickr", "migration", "cities"}));
  attract_cmd->add_option("--assigned", at_assigned, "assigned csv (flickr)");
  attract_cmd->add_option("--homes", at_homes, "homes csv (flickr)");
  attract_cmd->add_option("--regions", at_regions, "GeoJSON (flickr)");
  attract_cmd->add_option("--pop", at_pop, "region_id,population csv")
      ->required();
  attract_cmd->add_option("--od", at_od, "origin/destination csv (migration)");
  attract_cmd->add_option("--cities", at_cities, "cities csv (cities)");
  attract_cmd->add_option("--threshold", at_threshold,
                          "city population cutoff (cities)");
  attract_cmd->add_option("--out", at_out, "table csv")->required();
  attract_cmd->add_option("--meta", at_meta, "metadata sidecar json");
  attract_cmd->add_option("--capital-out", at_capital_out,
                          "capital population table (cities)");
  attract_cmd->add_option("--capital-meta", at_capital_meta,
                          "capital table metadata (cities)");

  // fit
  std::string fi_table, fi_out, fi_residuals;
  auto* fit_cmd = app.add_subcommand("fit", "fit the power-law scaling");
  fit_cmd->add_option("--table", fi_table, "attractiveness table csv")
      ->required();
  fit_cmd->add_option("--out", fi_out, "fit json")->required();
  fit_cmd->add_option("--residuals", fi_residuals, "ranked residual csv");

  // dist
  std::string di_values, di_out, di_fit_out;
  int di_bins = 20, di_column = 0;
  auto* dist_cmd =
      app.add_subcommand("dist", "log-normal fit and histogram table");
  dist_cmd->add_option("--values", di_values, "csv of positive values")
      ->required();
  dist_cmd->add_option("--column", di_column, "0-based value column");
  dist_cmd->add_option("--bins", di_bins, "log-spaced bin count (>= 2)");
  dist_cmd->add_option("--out", di_out, "histogram csv")->required();
  dist_cmd->add_option("--fit-out", di_fit_out, "mu/sigma json");

  // synth
  std::string sy_mode = "table", sy_out, sy_pop;
  geoscale::synth::SynthTableParams sy_params;
  auto* synth_cmd =
      app.add_subcommand("synth", "generate synthetic fixtures");
  synth_cmd->add_option("--mode", sy_mode, "table or world")
      ->check(CLI::IsMember({"table", "world"}));
  synth_cmd->add_option("--seed", sy_params.seed, "rng seed");
  synth_cmd->add_option("--regions", sy_params.n_regions, "region count");
  synth_cmd->add_option("--beta", sy_params.beta_true, "true exponent");
  synth_cmd->add_option("--sigma-pop", sy_params.sigma_pop,
                        "log population spread");
  synth_cmd->add_option("--noise", sy_params.noise_sigma,
                        "multiplicative log-normal noise");
  synth_cmd->add_option("--prefactor", sy_params.prefactor, "power-law a");
  synth_cmd->add_option("--median-pop", sy_params.median_pop,
                        "median region population");
  synth_cmd->add_option("--out", sy_out, "table csv or world geojson")
      ->required();
  synth_cmd->add_option("--pop", sy_pop,
                        "population csv to write (world mode)");

  // run: required inputs are validated after the config file merge, so a
  // config can supply any of them and explicit flags win
  geoscale::pipeline::PipelineConfig cfg;
  std::string run_config;
  auto* run_cmd =
      app.add_subcommand("run", "one-shot pipeline over raw input");
  run_cmd->add_option("--config", run_config,
                      "key=value file mirroring these flags");
  run_cmd->add_option("--input", cfg.input, "tsv or tsv.gz input");
  run_cmd->add_option("--regions", cfg.regions, "GeoJSON FeatureCollection");
  run_cmd->add_option("--pop", cfg.populations, "region_id,population csv");
  run_cmd->add_option("--schema", cfg.schema, "ingest column schema");
  run_cmd->add_option("--od", cfg.od_matrix, "optional OD matrix csv");
  run_cmd->add_option("--cities", cfg.cities, "optional cities csv");
  run_cmd->add_option("--city-threshold", cfg.city_threshold,
                      "city population cutoff");
  run_cmd->add_option("--outdir", cfg.outdir, "output directory");
  run_cmd->add_option("--records-format", cfg.records_format, "csv or bin")
      ->check(CLI::IsMember({"csv", "bin"}));
  run_cmd->add_option("--threads", cfg.threads, "worker cap (0 = auto)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  namespace pl = geoscale::pipeline;
  try {
    if (*ingest_cmd) {
      if (in_stats.empty()) in_stats = default_stats_path(in_out, ".stats.json");
      auto stats = pl::stage_ingest(in_input, in_schema, in_out, in_stats,
                                    in_threads);
      std::printf("kept %llu of %llu records\n",
                  static_cast<unsigned long long>(stats.kept),
                  static_cast<unsigned long long>(stats.total));
    } else if (*assign_cmd) {
      pl::stage_assign(as_records, as_regions, as_pop, as_out, as_threads);
    } else if (*homes_cmd) {
      if (ho_stats.empty()) ho_stats = default_stats_path(ho_out, "_stats.json");
      pl::stage_homes(ho_assigned, ho_regions, ho_out, ho_stats, ho_threads);
    } else if (*attract_cmd) {
      if (at_meta.empty()) at_meta = default_stats_path(at_out, ".meta.json");
      if (at_mode == "flickr") {
        if (at_assigned.empty() || at_homes.empty() || at_regions.empty())
          throw CLI::ValidationError(
              "attract", "--mode flickr needs --assigned, --homes, --regions");
        pl::stage_attract_flickr(at_assigned, at_homes, at_regions, at_pop,
                                 at_out, at_meta);
      } else if (at_mode == "migration") {
        if (at_od.empty())
          throw CLI::ValidationError("attract", "--mode migration needs --od");
        pl::stage_attract_migration(at_od, at_pop, at_out, at_meta);
      } else {
        if (at_cities.empty())
          throw CLI::ValidationError("attract", "--mode cities needs --cities");
        if (!at_capital_out.empty() && at_capital_meta.empty())
          at_capital_meta = default_stats_path(at_capital_out, ".meta.json");
        pl::stage_attract_cities(at_cities, at_pop, at_threshold, at_out,
                                 at_meta, at_capital_out, at_capital_meta);
      }
    } else if (*fit_cmd) {
      pl::stage_fit(fi_table, fi_out, fi_residuals);
    } else if (*dist_cmd) {
      pl::stage_dist(di_values, di_column, di_bins, di_out, di_fit_out);
    } else if (*synth_cmd) {
      if (sy_mode == "table") {
        geoscale::synth::write_synthetic(sy_params, sy_out);
      } else {
        geoscale::synth::SynthWorldParams wp;
        wp.seed = sy_params.seed;
        wp.n_regions = sy_params.n_regions;
        wp.sigma_pop = sy_params.sigma_pop;
        wp.median_pop = sy_params.median_pop;
        auto world = geoscale::synth::generate_world(wp);
        geoscale::regions::write_regions_geojson(sy_out, world);
        if (!sy_pop.empty()) {
          std::string buf = "region_id,population\n";
          for (const auto& r : world) {
            buf += r.region_id;
            buf += ',';
            buf += geoscale::csv::format_double(*r.population);
            buf += '\n';
          }
          std::ofstream out(sy_pop, std::ios::binary);
          if (!out) throw std::runtime_error("cannot write " + sy_pop);
          out << buf;
        }
      }
    } else if (*run_cmd) {
      if (!run_config.empty()) {
        auto kv = parse_config_file(run_config);
        auto take = [&](const char* key, const char* flag) {
          auto it = kv.find(key);
          if (it == kv.end()) return std::string();
          std::string value = it->second;
          kv.erase(it);
          return run_cmd->count(flag) > 0 ? std::string() : value;
        };
        if (auto v = take("input", "--input"); !v.empty()) cfg.input = v;
        if (auto v = take("regions", "--regions"); !v.empty()) cfg.regions = v;
        if (auto v = take("pop", "--pop"); !v.empty()) cfg.populations = v;
        if (auto v = take("schema", "--schema"); !v.empty()) cfg.schema = v;
        if (auto v = take("od", "--od"); !v.empty()) cfg.od_matrix = v;
        if (auto v = take("cities", "--cities"); !v.empty()) cfg.cities = v;
        if (auto v = take("outdir", "--outdir"); !v.empty()) cfg.outdir = v;
        if (auto v = take("records-format", "--records-format"); !v.empty())
          cfg.records_format = v;
        if (auto v = take("city-threshold", "--city-threshold"); !v.empty()) {
          auto parsed = geoscale::csv::parse_double(v);
          if (!parsed)
            throw CLI::ValidationError("run", "bad city-threshold: " + v);
          cfg.city_threshold = *parsed;
        }
        if (auto v = take("threads", "--threads"); !v.empty()) {
          auto parsed = geoscale::csv::parse_int(v);
          if (!parsed) throw CLI::ValidationError("run", "bad threads: " + v);
          cfg.threads = static_cast<int>(*parsed);
        }
        if (!kv.empty())
          throw CLI::ValidationError("run", "unknown config key: " +
                                                kv.begin()->first);
      }
      for (auto [value, name] :
           {std::pair{&cfg.input, "--input"}, {&cfg.regions, "--regions"},
            {&cfg.populations, "--pop"}, {&cfg.outdir, "--outdir"}}) {
        if (value->empty())
          throw CLI::ValidationError("run", std::string(name) + " is required");
      }
      if (cfg.records_format != "csv" && cfg.records_format != "bin")
        throw CLI::ValidationError("run", "records-format must be csv or bin");
      auto result = pl::run_pipeline(cfg);
      std::printf("pipeline complete, %zu outputs, manifest at %s\n",
                  result.outputs.size(), result.manifest_path.c_str());
    }
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const pl::StageError& e) {
    std::fprintf(stderr, "error in stage %s: %s\n", e.stage.c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
