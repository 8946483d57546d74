#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "crackpath/raster.hpp"

namespace crackpath {

enum class PathLabel { Correct, PlausibleAlternative, Incorrect };

std::string_view to_string(PathLabel label);

inline constexpr double kCorrectCutoff = 0.85;

struct MetricsReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  double f1 = 0.0;
  std::size_t wrong_pixels = 0;
  bool continuous = false;
  PathLabel label = PathLabel::Incorrect;
};

/// Pixelwise confusion counts and F1 = 2TP / (2TP + FP + FN); two empty
/// rasters score 1. Throws ShapeMismatch. Leaves continuity/label defaulted.
MetricsReport f1_score(const BinaryRaster& pred, const BinaryRaster& truth);

/// Labels 8-connected components of the nonzero pixels; returns the component
/// count and writes per-pixel labels (0 = background, 1.. = component).
std::size_t label_components(const BinaryRaster& raster, std::vector<int>* labels = nullptr);

/// Exactly one 8-connected crack component, and it reaches column 0.
bool is_continuous(const BinaryRaster& pred);

/// Incorrect when discontinuous whatever the F1; otherwise Correct when
/// F1 >= cutoff and PlausibleAlternative below it.
PathLabel classify(const BinaryRaster& pred, const BinaryRaster& truth, double cutoff = kCorrectCutoff);

/// Full report: counts, F1, continuity and label.
MetricsReport evaluate_pair(const BinaryRaster& pred, const BinaryRaster& truth, double cutoff = kCorrectCutoff);

struct PredictionPair {
  BinaryRaster pred;
  BinaryRaster truth;
};

/// Fraction labelled Correct at each cutoff. Throws EmptyCollection.
std::vector<double> threshold_sweep(std::span<const PredictionPair> pairs, std::span<const double> cutoffs);

struct DisplacementGrid {
  FieldRaster ux;
  FieldRaster uy;
};

struct DisplacementErrors {
  std::vector<double> mae_x;      ///< per sample
  std::vector<double> mae_y;      ///< per sample
  std::vector<double> mae_total;  ///< per sample, error-vector magnitude
  std::vector<double> ape;        ///< mae_total / normalizer, as a fraction
  double normalizer = 0.0;        ///< mean nodal displacement magnitude over all truths
  double mean_mae_x = 0.0;
  double mean_mae_y = 0.0;
  double mean_mae_total = 0.0;
  double mape = 0.0;  ///< mean of ape, as a fraction
};

/// Throws ShapeMismatch, EmptyCollection or ZeroNormalizer.
DisplacementErrors displacement_errors(std::span<const DisplacementGrid> preds,
                                       std::span<const DisplacementGrid> truths);

/// Aggregate of per-sample crack-path reports.
struct EvaluationSummary {
  std::size_t count = 0;
  std::size_t continuous_count = 0;
  double mean_f1 = 0.0;
  double mean_f1_continuous = 0.0;
  double mean_f1_discontinuous = 0.0;
  double mean_wrong_pixels = 0.0;
  double fraction_correct = 0.0;
  double fraction_plausible = 0.0;
  double fraction_incorrect = 0.0;
};

EvaluationSummary summarize(std::span<const MetricsReport> reports);

}  // namespace crackpath
