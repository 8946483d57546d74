#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crackpath/bitmap.hpp"
#include "crackpath/material.hpp"
#include "crackpath/metrics.hpp"
#include "crackpath/raster.hpp"
#include "crackpath/solver.hpp"

namespace crackpath {

std::string_view tool_version();

/// Everything a simulation or dataset run depends on. Read from a flat
/// `key = value` text file (`#` starts a comment); the parsed form is
/// snapshotted into every manifest.
struct RunConfig {
  // mesh and physics
  std::size_t mesh_n = 100;
  double E0 = 210000.0;
  double nu = 0.3;
  double Gf = 2.7;
  double ft = 2445.42;
  double l0 = 0.05;
  bool plane_strain = true;
  double omega_floor = 1e-6;
  bool allow_coarse_mesh = true;

  // load program and pre-crack
  std::size_t n_steps = 200;
  double increment = 1e-4;
  double max_displacement = 0.02;
  double crack_height = 0.5;
  double crack_length = 0.25;

  // staggered scheme
  double staggered_tol = 1e-3;
  int staggered_max_iterations = 50;
  int damage_max_iterations = 50;
  double stop_below_peak_fraction = 0.0;

  // inclusion placement
  double pixel_subregion_fraction = 0.6;
  double min_center_distance = 0.0525;
  int intensity_threshold = 10;
  int max_rejection_attempts = 100;

  // material source for `simulate` (generate takes the bitmap on the command line)
  std::string centers_file;
  std::string bitmap_file;
  std::size_t bitmap_index = 0;
  std::uint64_t seed = 0;

  // outputs
  std::string out_dir;
  std::size_t rigidity_resolution = 64;
  std::size_t damage_resolution = 256;
  double damage_threshold = 0.5;
  std::size_t snapshot_every = 0;  ///< 0 disables intermediate damage rasters
  bool export_nodal = false;       ///< final nodal fields as CSV

  SimulationConfig simulation() const;
  MaterialGenParams generation(std::uint64_t sample_seed) const;
};

/// Throws BadConfig on unknown keys or unparsable values.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical key/value form (every key, values printed round-trippably).
std::map<std::string, std::string> config_to_map(const RunConfig& config);
std::string config_to_text(const RunConfig& config);

/// Outputs of one finished simulation, ready to be written.
struct SampleRecord {
  FieldRaster rigidity;
  BinaryRaster damage;
  std::vector<double> curve_displacement;
  std::vector<double> curve_force;
};

SampleRecord make_sample_record(const MaterialField& material, const Mesh& mesh, const SimulationResult& result,
                                const RunConfig& config);

/// Two columns, no header: applied top-left displacement, reaction force.
std::string curve_to_csv(const std::vector<double>& displacement, const std::vector<double>& force);

struct SampleFiles {
  std::string rigidity;
  std::string damage;
  std::string curve;
  std::string centers;
  std::vector<std::string> extra;
};

struct SampleOutcome {
  SampleFiles files;
  double peak_force = 0.0;
  double final_force = 0.0;
  std::vector<std::string> warnings;
};

/// Runs one simulation for `material` and writes its files under `out_dir`
/// with names prefixed by `stem`. The centres file is written only for
/// heterogeneous materials.
SampleOutcome simulate_sample(const MaterialField& material, const RunConfig& config,
                              const std::filesystem::path& out_dir, const std::string& stem);

enum class SampleStatus { Ok, Failed };

struct ManifestEntry {
  std::size_t index = 0;
  std::size_t source_index = 0;
  std::size_t inclusion_count = 0;
  std::size_t skipped_count = 0;
  SampleStatus status = SampleStatus::Ok;
  SampleFiles files;
  double peak_force = 0.0;
  double final_force = 0.0;
  std::string message;
  double elapsed_seconds = 0.0;  ///< timing; excluded from reproducibility checks

  bool operator==(const ManifestEntry&) const;
};

struct DatasetManifest {
  std::uint64_t seed = 0;
  std::string bitmap_file;
  std::size_t range_begin = 0;
  std::size_t range_end = 0;
  std::map<std::string, std::string> config;
  std::string tool_version;
  std::vector<ManifestEntry> entries;
  double elapsed_seconds = 0.0;

  bool all_ok() const;
  /// Equality ignoring timing fields.
  bool same_content(const DatasetManifest& other) const;
};

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(std::string_view text);

/// Half-open sample range parsed from "A..B".
struct SampleRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};
SampleRange parse_range(std::string_view text);

/// Inclusion placement for sample `index` of a dataset.
InclusionPlacement sample_material(const IntensityGrid& bitmap, const RunConfig& config, std::uint64_t dataset_seed,
                                   std::size_t index);

/// Per-sample work: material already placed, returns outcome or throws.
using SampleRunner = std::function<SampleOutcome(std::size_t index, const MaterialField& material,
                                                 const RunConfig& config, const std::filesystem::path& out_dir,
                                                 const std::string& stem)>;

struct GenerateRequest {
  std::filesystem::path bitmap_file;
  SampleRange range;
  std::uint64_t seed = 0;
  RunConfig config;
  std::size_t jobs = 1;
  std::filesystem::path out_dir;
};

/// Generates samples [range.begin, range.end) of the bitmap file on `jobs`
/// workers. Each sample depends only on (bitmap, seed, index, config), so the
/// results do not depend on the job count. A failing sample is recorded and
/// the others continue. The manifest is written last, as manifest.json.
DatasetManifest generate_dataset(const GenerateRequest& request, const SampleRunner& runner = {});

/// Runs fn(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

std::string sample_stem(std::size_t index);

// ---------------------------------------------------------------------------
// Evaluation

struct SampleEvaluation {
  std::string name;
  MetricsReport report;
};

struct EvaluationResult {
  std::vector<SampleEvaluation> samples;
  EvaluationSummary summary;
  double cutoff = kCorrectCutoff;
  std::vector<double> sweep_cutoffs;
  std::vector<double> sweep_fraction_correct;
};

/// Crack rasters considered for evaluation: `*_damage.crk` and `*.pgm`.
bool is_crack_raster_file(const std::filesystem::path& path);

/// Pairs crack rasters by file name. Throws MissingPair when a name exists in
/// only one directory.
EvaluationResult evaluate_directories(const std::filesystem::path& pred_dir, const std::filesystem::path& truth_dir,
                                      double cutoff, const std::vector<double>& sweep_cutoffs = {});

std::string evaluation_to_json(const EvaluationResult& result);
std::string evaluation_to_csv(const EvaluationResult& result);
std::string sweep_to_csv(const EvaluationResult& result);

}  // namespace crackpath
