#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "crackpath/bitmap.hpp"
#include "crackpath/dataset.hpp"
#include "crackpath/error.hpp"
#include "crackpath/material.hpp"
#include "crackpath/raster.hpp"

namespace fs = std::filesystem;
using namespace crackpath;

namespace {

enum Exit { kOk = 0, kUsage = 1, kSimulation = 2, kEvaluation = 3 };

std::optional<std::string> env(const char* name) {
  if (const char* v = std::getenv(name); v && *v) return std::string(v);
  return std::nullopt;
}

fs::path output_dir(const std::string& flag, const RunConfig& config) {
  if (!flag.empty()) return flag;
  if (auto v = env("CRACKPATH_OUT")) return *v;
  if (!config.out_dir.empty()) return config.out_dir;
  return ".";
}

std::size_t job_count(std::size_t flag) {
  if (flag > 0) return flag;
  if (auto v = env("CRACKPATH_JOBS")) {
    try {
      const auto n = std::stoul(*v);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::BadConfig, fmt::format("CRACKPATH_JOBS='{}' is not a positive integer", *v));
  }
  return 1;
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

MaterialField simulate_material(const RunConfig& config, const std::optional<std::uint64_t>& seed_flag) {
  MaterialField material;
  if (!config.centers_file.empty()) {
    const auto bytes = read_file_bytes(config.centers_file);
    material.centers = centers_from_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    material.background = {config.E0, config.Gf, config.ft};
  } else if (!config.bitmap_file.empty()) {
    const auto bitmaps = read_idx_file(config.bitmap_file);
    if (config.bitmap_index >= bitmaps.size())
      throw Error(ErrorCode::OutOfRange, fmt::format("bitmap_index {} exceeds the {} images in {}", config.bitmap_index,
                                                     bitmaps.size(), config.bitmap_file));
    const auto seed = seed_flag.value_or(config.seed);
    auto placement = sample_material(bitmaps[config.bitmap_index], config, seed, config.bitmap_index);
    for (const auto& px : placement.skipped)
      warn(fmt::format("pixel ({}, {}) skipped: no candidate cleared the minimum centre distance", px.row, px.col));
    material = std::move(placement.field);
  } else {
    material.background = {config.E0, config.Gf, config.ft};
  }
  return material;
}

int cmd_simulate(const std::string& config_path, const std::optional<std::uint64_t>& seed, const std::string& out,
                 const std::string& stem) {
  const auto config = config_path.empty() ? RunConfig{} : load_config(config_path);
  const auto material = simulate_material(config, seed);
  const auto dir = output_dir(out, config);
  const auto outcome = simulate_sample(material, config, dir, stem);
  for (const auto& w : outcome.warnings) warn(w);
  std::cout << fmt::format("wrote {} {} {} to {} (peak force {:.6g})\n", outcome.files.rigidity, outcome.files.damage,
                           outcome.files.curve, dir.string(), outcome.peak_force);
  return kOk;
}

int cmd_generate(const std::string& bitmap, const std::string& range, const std::string& config_path,
                 std::optional<std::uint64_t> seed, std::size_t jobs, const std::string& out) {
  GenerateRequest request;
  request.config = config_path.empty() ? RunConfig{} : load_config(config_path);
  request.bitmap_file = bitmap;
  request.range = parse_range(range);
  request.seed = seed.value_or(request.config.seed);
  request.jobs = job_count(jobs);
  request.out_dir = output_dir(out, request.config);
  const auto manifest = generate_dataset(request);
  int failures = 0;
  for (const auto& e : manifest.entries) {
    if (e.status == SampleStatus::Failed) {
      ++failures;
      std::cerr << fmt::format("error: sample {} failed: {}\n", e.index, e.message);
    } else if (!e.message.empty()) {
      warn(fmt::format("sample {}: {}", e.index, e.message));
    }
  }
  std::cout << fmt::format("{} of {} samples ok; manifest at {}\n", manifest.entries.size() - failures,
                           manifest.entries.size(), (request.out_dir / "manifest.json").string());
  return failures ? kSimulation : kOk;
}

int cmd_evaluate(const std::string& pred, const std::string& truth, double cutoff, const std::vector<double>& sweep,
                 const std::string& out) {
  const auto result = evaluate_directories(pred, truth, cutoff, sweep);
  const fs::path dir = out.empty() ? fs::path(env("CRACKPATH_OUT").value_or(".")) : fs::path(out);
  fs::create_directories(dir);
  write_file_atomic(dir / "evaluation.json", evaluation_to_json(result));
  write_file_atomic(dir / "evaluation.csv", evaluation_to_csv(result));
  if (!sweep.empty()) write_file_atomic(dir / "sweep.csv", sweep_to_csv(result));
  const auto& s = result.summary;
  std::cout << fmt::format(
      "{} samples: mean F1 {:.4f}, correct {:.1f}%, plausible {:.1f}%, incorrect {:.1f}%, mean wrong pixels {:.1f}\n",
      s.count, s.mean_f1, 100 * s.fraction_correct, 100 * s.fraction_plausible, 100 * s.fraction_incorrect,
      s.mean_wrong_pixels);
  return kOk;
}

int cmd_export(const std::string& input, const std::string& format, const std::string& out) {
  const auto decoded = read_raster_file(input);
  fs::path target = out.empty() ? fs::path(input).replace_extension(format) : fs::path(out);
  if (format == "csv") {
    write_file_atomic(target, raster_to_csv(decoded.as_field()));
  } else if (decoded.dtype == RasterDtype::U8) {
    write_file_atomic(target, encode_pgm(to_intensity(decoded.u8)));
  } else {
    // scale a field raster to 0..255 over its own range
    const auto& f = decoded.f64;
    const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
    const double span = f.values.empty() || *hi == *lo ? 1.0 : *hi - *lo;
    IntensityGrid grid(f.n, f.n);
    for (std::size_t k = 0; k < f.values.size(); ++k)
      grid.values[k] = static_cast<std::uint8_t>(std::lround(255.0 * (f.values[k] - *lo) / span));
    write_file_atomic(target, encode_pgm(grid));
  }
  std::cout << target.string() << '\n';
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::SingularSystem:
    case ErrorCode::InvalidResolution:
      return kSimulation;
    case ErrorCode::MissingPair:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::EmptyCollection:
      return kEvaluation;
    default:
      return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-field fracture dataset generator and evaluator"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  std::string config_path, out, bitmap, range, pred, truth, input, format = "pgm", stem = "sample";
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 0;
  double cutoff = kCorrectCutoff;
  std::vector<double> sweep;

  auto* simulate = app.add_subcommand("simulate", "Run one simulation and write its rasters and force curve");
  simulate->add_option("--config", config_path, "Run configuration file")->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "Seed for inclusion placement (overrides the config)");
  simulate->add_option("--out", out, "Output directory (default $CRACKPATH_OUT, then the config, then .)");
  simulate->add_option("--name", stem, "File name prefix")->capture_default_str();

  auto* generate = app.add_subcommand("generate", "Generate a dataset from an IDX bitmap file");
  generate->add_option("bitmap", bitmap, "IDX3 unsigned-byte image file")->required()->check(CLI::ExistingFile);
  generate->add_option("--range", range, "Half-open sample range A..B")->required();
  generate->add_option("--config", config_path, "Run configuration file")->check(CLI::ExistingFile);
  generate->add_option("--seed", seed, "Dataset seed (overrides the config)");
  generate->add_option("--jobs", jobs, "Worker threads (default $CRACKPATH_JOBS, then 1)");
  generate->add_option("--out", out, "Output directory (default $CRACKPATH_OUT, then the config, then .)");

  auto* evaluate = app.add_subcommand("evaluate", "Score predicted crack rasters against ground truth");
  evaluate->add_option("pred", pred, "Directory of predicted rasters")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("truth", truth, "Directory of ground-truth rasters")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--cutoff", cutoff, "F1 cutoff for a correct path")->capture_default_str()->check(
      CLI::Range(0.0, 1.0));
  evaluate->add_option("--sweep", sweep, "Cutoffs for the threshold sweep CSV");
  evaluate->add_option("--out", out, "Report directory (default $CRACKPATH_OUT, then .)");

  auto* exporter = app.add_subcommand("export", "Convert a raster container to PGM or CSV");
  exporter->add_option("input", input, "Raster container file")->required()->check(CLI::ExistingFile);
  exporter->add_option("--format", format, "pgm or csv")->capture_default_str()->check(CLI::IsMember({"pgm", "csv"}));
  exporter->add_option("--out", out, "Output file (default: input with the new extension)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(config_path, seed, out, stem);
    if (*generate) return cmd_generate(bitmap, range, config_path, seed, jobs, out);
    if (*evaluate) return cmd_evaluate(pred, truth, cutoff, sweep, out);
    if (*exporter) return cmd_export(input, format, out);
  } catch (const Error& e) {
    std::cerr << fmt::format("error [{}]: {}\n", to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
