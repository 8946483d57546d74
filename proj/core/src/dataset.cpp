#include "crackpath/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "crackpath/error.hpp"
#include "crackpath/sampling.hpp"

namespace crackpath {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view tool_version() { return "crackpath 0.1.0"; }

// ---------------------------------------------------------------------------
// Config

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string v) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')))
    return v.substr(1, v.size() - 2);
  return v;
}

// '#' starts a comment unless it sits inside a quoted value.
std::size_t comment_start(std::string_view line) {
  char quote = 0;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quote) {
      if (ch == quote) quote = 0;
    } else if (ch == '"' || ch == '\'') {
      quote = ch;
    } else if (ch == '#') {
      return k;
    }
  }
  return line.size();
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, std::string_view what) {
  throw Error(ErrorCode::BadConfig, fmt::format("config key '{}': cannot parse '{}' as {}", key, value, what));
}

template <typename T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc{} || res.ptr != end) bad_value(key, value, "an unsigned integer");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(out)) bad_value(key, value, "a number");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "a boolean");
}

// One table drives parsing and the canonical snapshot.
struct Field {
  const char* key;
  enum Kind { Size, Int, U64, Real, Bool, Text } kind;
  void* (*ptr)(RunConfig&);
};

#define CRACKPATH_FIELD(name, kind) \
  Field { #name, Field::kind, [](RunConfig& c) -> void* { return &c.name; } }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      CRACKPATH_FIELD(mesh_n, Size),
      CRACKPATH_FIELD(E0, Real),
      CRACKPATH_FIELD(nu, Real),
      CRACKPATH_FIELD(Gf, Real),
      CRACKPATH_FIELD(ft, Real),
      CRACKPATH_FIELD(l0, Real),
      CRACKPATH_FIELD(plane_strain, Bool),
      CRACKPATH_FIELD(omega_floor, Real),
      CRACKPATH_FIELD(allow_coarse_mesh, Bool),
      CRACKPATH_FIELD(n_steps, Size),
      CRACKPATH_FIELD(increment, Real),
      CRACKPATH_FIELD(max_displacement, Real),
      CRACKPATH_FIELD(crack_height, Real),
      CRACKPATH_FIELD(crack_length, Real),
      CRACKPATH_FIELD(staggered_tol, Real),
      CRACKPATH_FIELD(staggered_max_iterations, Int),
      CRACKPATH_FIELD(damage_max_iterations, Int),
      CRACKPATH_FIELD(stop_below_peak_fraction, Real),
      CRACKPATH_FIELD(pixel_subregion_fraction, Real),
      CRACKPATH_FIELD(min_center_distance, Real),
      CRACKPATH_FIELD(intensity_threshold, Int),
      CRACKPATH_FIELD(max_rejection_attempts, Int),
      CRACKPATH_FIELD(centers_file, Text),
      CRACKPATH_FIELD(bitmap_file, Text),
      CRACKPATH_FIELD(bitmap_index, Size),
      CRACKPATH_FIELD(seed, U64),
      CRACKPATH_FIELD(out_dir, Text),
      CRACKPATH_FIELD(rigidity_resolution, Size),
      CRACKPATH_FIELD(damage_resolution, Size),
      CRACKPATH_FIELD(damage_threshold, Real),
      CRACKPATH_FIELD(snapshot_every, Size),
      CRACKPATH_FIELD(export_nodal, Bool),
  };
  return table;
}

#undef CRACKPATH_FIELD

void assign(const Field& f, RunConfig& c, const std::string& value) {
  void* p = f.ptr(c);
  switch (f.kind) {
    case Field::Size: *static_cast<std::size_t*>(p) = parse_integer<std::size_t>(f.key, value); break;
    case Field::Int: *static_cast<int*>(p) = parse_integer<int>(f.key, value); break;
    case Field::U64: *static_cast<std::uint64_t*>(p) = parse_integer<std::uint64_t>(f.key, value); break;
    case Field::Real: *static_cast<double*>(p) = parse_double(f.key, value); break;
    case Field::Bool: *static_cast<bool*>(p) = parse_bool(f.key, value); break;
    case Field::Text: *static_cast<std::string*>(p) = value; break;
  }
}

std::string render(const Field& f, const RunConfig& c) {
  void* p = f.ptr(const_cast<RunConfig&>(c));
  switch (f.kind) {
    case Field::Size: return fmt::format("{}", *static_cast<std::size_t*>(p));
    case Field::Int: return fmt::format("{}", *static_cast<int*>(p));
    case Field::U64: return fmt::format("{}", *static_cast<std::uint64_t*>(p));
    case Field::Real: return fmt::format("{}", *static_cast<double*>(p));
    case Field::Bool: return *static_cast<bool*>(p) ? "true" : "false";
    case Field::Text: return *static_cast<std::string*>(p);
  }
  return {};
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, std::string_view msg) {
    if (!ok) throw Error(ErrorCode::BadConfig, std::string(msg));
  };
  require(c.mesh_n >= 2, "mesh_n must be at least 2");
  require(c.E0 > 0 && c.Gf > 0 && c.ft > 0 && c.l0 > 0, "E0, Gf, ft and l0 must be positive");
  require(c.nu > -1.0 && c.nu < 0.5, "nu must lie in (-1, 0.5)");
  require(c.n_steps >= 1 && c.increment > 0, "n_steps and increment must be positive");
  require(std::abs(static_cast<double>(c.n_steps) * c.increment - c.max_displacement) <= 1e-12,
          "n_steps * increment must equal max_displacement");
  require(c.staggered_tol > 0 && c.staggered_max_iterations >= 1 && c.damage_max_iterations >= 1,
          "staggered and damage iteration settings must be positive");
  require(c.intensity_threshold >= 0 && c.intensity_threshold <= 255, "intensity_threshold must be in [0, 255]");
  require(c.pixel_subregion_fraction > 0 && c.pixel_subregion_fraction <= 1,
          "pixel_subregion_fraction must be in (0, 1]");
  require(c.rigidity_resolution >= 1 && c.damage_resolution >= 1, "raster resolutions must be positive");
  require(c.centers_file.empty() || c.bitmap_file.empty(), "set at most one of centers_file and bitmap_file");
}

}  // namespace

SimulationConfig RunConfig::simulation() const {
  SimulationConfig s;
  s.mesh_n = mesh_n;
  s.params = derive_params(E0, nu, Gf, ft, l0);
  s.params.plane_strain = plane_strain;
  s.params.omega_floor = omega_floor;
  s.load = {n_steps, increment, max_displacement};
  s.crack = {crack_height, crack_length};
  s.staggered.phi_tol = staggered_tol;
  s.staggered.max_iterations = staggered_max_iterations;
  s.staggered.damage.max_iterations = damage_max_iterations;
  s.allow_coarse_mesh = allow_coarse_mesh;
  s.stop_below_peak_fraction = stop_below_peak_fraction;
  return s;
}

MaterialGenParams RunConfig::generation(std::uint64_t sample_seed_value) const {
  MaterialGenParams g;
  g.pixel_subregion_fraction = pixel_subregion_fraction;
  g.min_center_distance = min_center_distance;
  g.intensity_threshold = static_cast<std::uint8_t>(intensity_threshold);
  g.max_rejection_attempts = max_rejection_attempts;
  g.seed = sample_seed_value;
  return g;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    line = line.substr(0, comment_start(line));
    const auto content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::BadConfig, fmt::format("config line {}: expected 'key = value'", line_no));
    const auto key = trim(std::string_view(content).substr(0, eq));
    const auto value = unquote(trim(std::string_view(content).substr(eq + 1)));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return key == f.key; });
    if (it == table.end()) throw Error(ErrorCode::BadConfig, fmt::format("config line {}: unknown key '{}'", line_no, key));
    if (!seen.insert(key).second)
      throw Error(ErrorCode::BadConfig, fmt::format("config line {}: duplicate key '{}'", line_no, key));
    assign(*it, config, value);
  }
  validate(config);
  return config;
}

RunConfig load_config(const fs::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file_bytes(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::BadConfig, e.what());
  }
  return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::map<std::string, std::string> config_to_map(const RunConfig& config) {
  std::map<std::string, std::string> out;
  for (const auto& f : fields()) out[f.key] = render(f, config);
  return out;
}

std::string config_to_text(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    const auto v = render(f, config);
    out += f.kind == Field::Text ? fmt::format("{} = \"{}\"\n", f.key, v) : fmt::format("{} = {}\n", f.key, v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sample outputs

SampleRecord make_sample_record(const MaterialField& material, const Mesh& mesh, const SimulationResult& result,
                                const RunConfig& config) {
  SampleRecord record;
  record.rigidity = rasterize_rigidity(material, config.rigidity_resolution);
  record.damage = binarize(sample_to_raster(mesh, result.phi, config.damage_resolution, "damage"),
                           config.damage_threshold);
  record.curve_displacement = result.curve_displacement;
  record.curve_force = result.curve_force;
  return record;
}

std::string curve_to_csv(const std::vector<double>& displacement, const std::vector<double>& force) {
  if (displacement.size() != force.size()) throw Error(ErrorCode::ShapeMismatch, "curve columns differ in length");
  std::string out;
  for (std::size_t k = 0; k < force.size(); ++k) out += fmt::format("{:.17g},{:.17g}\n", displacement[k], force[k]);
  return out;
}

namespace {

std::string nodal_csv(const Mesh& mesh, const SimulationResult& result) {
  std::string out = "x,y,ux,uy,phi\n";
  for (std::size_t k = 0; k < mesh.num_nodes(); ++k) {
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", mesh.nodes[k].x, mesh.nodes[k].y,
                       result.u[2 * k], result.u[2 * k + 1], result.phi[k]);
  }
  return out;
}

}  // namespace

SampleOutcome simulate_sample(const MaterialField& material, const RunConfig& config, const fs::path& out_dir,
                              const std::string& stem) {
  fs::create_directories(out_dir);
  const auto sim = config.simulation();
  const auto mesh = build_structured_mesh(sim.mesh_n);

  SampleOutcome outcome;
  StepObserver observer;
  if (config.snapshot_every > 0) {
    observer = [&](const SimulationState& state, const Mesh& m) {
      const std::size_t step = state.step - 1;
      if (step == 0 || step % config.snapshot_every != 0) return;
      const auto name = fmt::format("{}_damage_step{:04}.crk", stem, step);
      const auto raster = binarize(sample_to_raster(m, state.phi, config.damage_resolution, "damage"),
                                   config.damage_threshold);
      write_file_atomic(out_dir / name, encode_raster(raster));
      outcome.files.extra.push_back(name);
    };
  }

  const auto result = run_simulation(material, mesh, sim, observer);
  const auto record = make_sample_record(material, mesh, result, config);

  outcome.files.rigidity = stem + "_rigidity.crk";
  outcome.files.damage = stem + "_damage.crk";
  outcome.files.curve = stem + "_curve.csv";
  write_file_atomic(out_dir / outcome.files.rigidity, encode_raster(record.rigidity));
  write_file_atomic(out_dir / outcome.files.damage, encode_raster(record.damage));
  write_file_atomic(out_dir / outcome.files.curve, curve_to_csv(record.curve_displacement, record.curve_force));
  if (!material.centers.empty()) {
    outcome.files.centers = stem + "_centers.csv";
    write_file_atomic(out_dir / outcome.files.centers, centers_to_csv(material.centers));
  }
  if (config.export_nodal) {
    const auto name = stem + "_nodal.csv";
    write_file_atomic(out_dir / name, nodal_csv(mesh, result));
    outcome.files.extra.push_back(name);
  }

  outcome.peak_force = result.peak_force();
  outcome.final_force = result.curve_force.empty() ? 0.0 : result.curve_force.back();
  outcome.warnings = result.warnings;
  return outcome;
}

// ---------------------------------------------------------------------------
// Manifest

bool ManifestEntry::operator==(const ManifestEntry& o) const {
  return index == o.index && source_index == o.source_index && inclusion_count == o.inclusion_count &&
         skipped_count == o.skipped_count && status == o.status && files.rigidity == o.files.rigidity &&
         files.damage == o.files.damage && files.curve == o.files.curve && files.centers == o.files.centers &&
         files.extra == o.files.extra && peak_force == o.peak_force && final_force == o.final_force &&
         message == o.message;
}

bool DatasetManifest::all_ok() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.status == SampleStatus::Ok; });
}

bool DatasetManifest::same_content(const DatasetManifest& o) const {
  return seed == o.seed && bitmap_file == o.bitmap_file && range_begin == o.range_begin &&
         range_end == o.range_end && config == o.config && tool_version == o.tool_version && entries == o.entries;
}

std::string manifest_to_json(const DatasetManifest& m) {
  json entries = json::array();
  for (const auto& e : m.entries) {
    entries.push_back({
        {"index", e.index},
        {"source_index", e.source_index},
        {"inclusion_count", e.inclusion_count},
        {"skipped_count", e.skipped_count},
        {"status", e.status == SampleStatus::Ok ? "ok" : "failed"},
        {"files",
         {{"rigidity", e.files.rigidity},
          {"damage", e.files.damage},
          {"curve", e.files.curve},
          {"centers", e.files.centers},
          {"extra", e.files.extra}}},
        {"peak_force", e.peak_force},
        {"final_force", e.final_force},
        {"message", e.message},
        {"elapsed_seconds", e.elapsed_seconds},
    });
  }
  json doc = {
      {"tool_version", m.tool_version},
      {"seed", m.seed},
      {"bitmap_file", m.bitmap_file},
      {"range", {m.range_begin, m.range_end}},
      {"config", m.config},
      {"entries", std::move(entries)},
      {"elapsed_seconds", m.elapsed_seconds},
  };
  return doc.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    DatasetManifest m;
    m.tool_version = doc.at("tool_version").get<std::string>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.bitmap_file = doc.at("bitmap_file").get<std::string>();
    m.range_begin = doc.at("range").at(0).get<std::size_t>();
    m.range_end = doc.at("range").at(1).get<std::size_t>();
    m.config = doc.at("config").get<std::map<std::string, std::string>>();
    m.elapsed_seconds = doc.at("elapsed_seconds").get<double>();
    for (const auto& j : doc.at("entries")) {
      ManifestEntry e;
      e.index = j.at("index").get<std::size_t>();
      e.source_index = j.at("source_index").get<std::size_t>();
      e.inclusion_count = j.at("inclusion_count").get<std::size_t>();
      e.skipped_count = j.at("skipped_count").get<std::size_t>();
      const auto status = j.at("status").get<std::string>();
      if (status != "ok" && status != "failed") throw Error(ErrorCode::BadConfig, "unknown sample status " + status);
      e.status = status == "ok" ? SampleStatus::Ok : SampleStatus::Failed;
      const auto& f = j.at("files");
      e.files.rigidity = f.at("rigidity").get<std::string>();
      e.files.damage = f.at("damage").get<std::string>();
      e.files.curve = f.at("curve").get<std::string>();
      e.files.centers = f.at("centers").get<std::string>();
      e.files.extra = f.at("extra").get<std::vector<std::string>>();
      e.peak_force = j.at("peak_force").get<double>();
      e.final_force = j.at("final_force").get<double>();
      e.message = j.at("message").get<std::string>();
      e.elapsed_seconds = j.at("elapsed_seconds").get<double>();
      m.entries.push_back(std::move(e));
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, fmt::format("manifest is not valid: {}", e.what()));
  }
}

// ---------------------------------------------------------------------------
// Generation

SampleRange parse_range(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) throw Error(ErrorCode::BadConfig, fmt::format("range '{}' is not A..B", text));
  const std::string a(text.substr(0, dots));
  const std::string b(text.substr(dots + 2));
  SampleRange r{parse_integer<std::size_t>("range", a), parse_integer<std::size_t>("range", b)};
  if (r.end <= r.begin) throw Error(ErrorCode::BadConfig, fmt::format("range '{}' is empty", text));
  return r;
}

std::string sample_stem(std::size_t index) { return fmt::format("sample_{:06}", index); }

InclusionPlacement sample_material(const IntensityGrid& bitmap, const RunConfig& config, std::uint64_t dataset_seed,
                                   std::size_t index) {
  auto placement = place_inclusions(bitmap, config.generation(sample_seed(dataset_seed, index)));
  placement.field.background = {config.E0, config.Gf, config.ft};
  return placement;
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

DatasetManifest generate_dataset(const GenerateRequest& request, const SampleRunner& runner) {
  const auto start = std::chrono::steady_clock::now();
  const auto bitmaps = read_idx_file(request.bitmap_file);
  if (request.range.end <= request.range.begin) throw Error(ErrorCode::BadConfig, "sample range is empty");
  if (request.range.end > bitmaps.size())
    throw Error(ErrorCode::OutOfRange, fmt::format("range end {} exceeds the {} images in {}", request.range.end,
                                                   bitmaps.size(), request.bitmap_file.string()));
  fs::create_directories(request.out_dir);

  const SampleRunner run = runner ? runner
                                  : SampleRunner([](std::size_t, const MaterialField& material, const RunConfig& config,
                                                    const fs::path& out, const std::string& stem) {
                                      return simulate_sample(material, config, out, stem);
                                    });

  const std::size_t count = request.range.end - request.range.begin;
  std::vector<ManifestEntry> entries(count);
  parallel_for(count, request.jobs, [&](std::size_t k) {
    const auto t0 = std::chrono::steady_clock::now();
    auto& entry = entries[k];
    entry.index = request.range.begin + k;
    entry.source_index = entry.index;
    try {
      const auto placement = sample_material(bitmaps[entry.source_index], request.config, request.seed, entry.index);
      entry.inclusion_count = placement.field.centers.size();
      entry.skipped_count = placement.skipped.size();
      auto outcome = run(entry.index, placement.field, request.config, request.out_dir, sample_stem(entry.index));
      entry.files = std::move(outcome.files);
      entry.peak_force = outcome.peak_force;
      entry.final_force = outcome.final_force;
      std::string msg;
      for (const auto& w : outcome.warnings) msg += (msg.empty() ? "" : "; ") + w;
      entry.message = std::move(msg);
      entry.status = SampleStatus::Ok;
    } catch (const std::exception& e) {
      entry.status = SampleStatus::Failed;
      entry.files = {};
      entry.message = e.what();
    }
    entry.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });

  DatasetManifest manifest;
  manifest.seed = request.seed;
  manifest.bitmap_file = request.bitmap_file.filename().string();
  manifest.range_begin = request.range.begin;
  manifest.range_end = request.range.end;
  manifest.config = config_to_map(request.config);
  manifest.tool_version = std::string(tool_version());
  manifest.entries = std::move(entries);
  manifest.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file_atomic(request.out_dir / "manifest.json", manifest_to_json(manifest));
  return manifest;
}

// ---------------------------------------------------------------------------
// Evaluation

bool is_crack_raster_file(const fs::path& path) {
  const auto name = path.filename().string();
  const auto ends_with = [&](std::string_view suffix) {
    return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends_with("_damage.crk") || ends_with(".pgm");
}

namespace {

std::set<std::string> crack_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, fmt::format("{} is not a directory", dir.string()));
  std::set<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_crack_raster_file(entry.path())) names.insert(entry.path().filename().string());
  }
  return names;
}

}  // namespace

EvaluationResult evaluate_directories(const fs::path& pred_dir, const fs::path& truth_dir, double cutoff,
                                      const std::vector<double>& sweep_cutoffs) {
  const auto preds = crack_files(pred_dir);
  const auto truths = crack_files(truth_dir);
  for (const auto& name : preds)
    if (!truths.count(name))
      throw Error(ErrorCode::MissingPair, fmt::format("{} has no counterpart in {}", name, truth_dir.string()));
  for (const auto& name : truths)
    if (!preds.count(name))
      throw Error(ErrorCode::MissingPair, fmt::format("{} has no counterpart in {}", name, pred_dir.string()));
  if (preds.empty()) throw Error(ErrorCode::EmptyCollection, "no crack rasters to evaluate");

  EvaluationResult result;
  result.cutoff = cutoff;
  std::vector<PredictionPair> pairs;
  std::vector<MetricsReport> reports;
  for (const auto& name : preds) {
    PredictionPair pair{load_binary_raster(pred_dir / name), load_binary_raster(truth_dir / name)};
    auto report = evaluate_pair(pair.pred, pair.truth, cutoff);
    result.samples.push_back({name, report});
    reports.push_back(report);
    if (!sweep_cutoffs.empty()) pairs.push_back(std::move(pair));
  }
  result.summary = summarize(reports);
  if (!sweep_cutoffs.empty()) {
    result.sweep_cutoffs = sweep_cutoffs;
    result.sweep_fraction_correct = threshold_sweep(pairs, sweep_cutoffs);
  }
  return result;
}

std::string evaluation_to_json(const EvaluationResult& r) {
  json samples = json::array();
  for (const auto& s : r.samples) {
    samples.push_back({
        {"name", s.name},
        {"tp", s.report.tp},
        {"fp", s.report.fp},
        {"fn", s.report.fn},
        {"tn", s.report.tn},
        {"f1", s.report.f1},
        {"wrong_pixels", s.report.wrong_pixels},
        {"continuous", s.report.continuous},
        {"label", std::string(to_string(s.report.label))},
    });
  }
  const auto& m = r.summary;
  json doc = {
      {"cutoff", r.cutoff},
      {"summary",
       {{"count", m.count},
        {"continuous_count", m.continuous_count},
        {"mean_f1", m.mean_f1},
        {"mean_f1_continuous", m.mean_f1_continuous},
        {"mean_f1_discontinuous", m.mean_f1_discontinuous},
        {"mean_wrong_pixels", m.mean_wrong_pixels},
        {"fraction_correct", m.fraction_correct},
        {"fraction_plausible", m.fraction_plausible},
        {"fraction_incorrect", m.fraction_incorrect}}},
      {"samples", std::move(samples)},
  };
  if (!r.sweep_cutoffs.empty()) {
    json sweep = json::array();
    for (std::size_t k = 0; k < r.sweep_cutoffs.size(); ++k)
      sweep.push_back({{"cutoff", r.sweep_cutoffs[k]}, {"fraction_correct", r.sweep_fraction_correct[k]}});
    doc["sweep"] = std::move(sweep);
  }
  return doc.dump(2) + "\n";
}

std::string evaluation_to_csv(const EvaluationResult& r) {
  std::string out = "name,tp,fp,fn,tn,f1,wrong_pixels,continuous,label\n";
  for (const auto& s : r.samples) {
    const auto& x = s.report;
    out += fmt::format("{},{},{},{},{},{:.17g},{},{},{}\n", s.name, x.tp, x.fp, x.fn, x.tn, x.f1, x.wrong_pixels,
                       x.continuous ? 1 : 0, to_string(x.label));
  }
  return out;
}

std::string sweep_to_csv(const EvaluationResult& r) {
  std::string out = "cutoff,fraction_correct\n";
  for (std::size_t k = 0; k < r.sweep_cutoffs.size(); ++k)
    out += fmt::format("{:.17g},{:.17g}\n", r.sweep_cutoffs[k], r.sweep_fraction_correct[k]);
  return out;
}

}  // namespace crackpath
