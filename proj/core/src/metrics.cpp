#include "crackpath/metrics.hpp"

#include <cmath>

#include "crackpath/error.hpp"

namespace crackpath {

std::string_view to_string(PathLabel label) {
  switch (label) {
    case PathLabel::Correct: return "Correct";
    case PathLabel::PlausibleAlternative: return "PlausibleAlternative";
    case PathLabel::Incorrect: return "Incorrect";
  }
  return "Unknown";
}

namespace {

void check_shapes(const BinaryRaster& a, const BinaryRaster& b) {
  if (a.n != b.n || a.values.size() != b.values.size()) {
    throw Error(ErrorCode::ShapeMismatch, "prediction and truth rasters differ in size");
  }
}

void check_shapes(const FieldRaster& a, const FieldRaster& b) {
  if (a.n != b.n || a.values.size() != b.values.size()) {
    throw Error(ErrorCode::ShapeMismatch, "displacement rasters differ in size");
  }
}

}  // namespace

MetricsReport f1_score(const BinaryRaster& pred, const BinaryRaster& truth) {
  check_shapes(pred, truth);
  MetricsReport r;
  for (std::size_t k = 0; k < pred.values.size(); ++k) {
    const bool p = pred.values[k] != 0;
    const bool t = truth.values[k] != 0;
    if (p && t) ++r.tp;
    else if (p) ++r.fp;
    else if (t) ++r.fn;
    else ++r.tn;
  }
  const std::size_t denom = 2 * r.tp + r.fp + r.fn;
  r.f1 = denom == 0 ? 1.0 : 2.0 * static_cast<double>(r.tp) / static_cast<double>(denom);
  r.wrong_pixels = r.fp + r.fn;
  return r;
}

std::size_t label_components(const BinaryRaster& raster, std::vector<int>* labels) {
  const auto n = static_cast<long>(raster.n);
  std::vector<int> lab(raster.values.size(), 0);
  std::vector<long> stack;
  int count = 0;
  for (long start = 0; start < n * n; ++start) {
    if (!raster.values[start] || lab[start]) continue;
    ++count;
    lab[start] = count;
    stack.push_back(start);
    while (!stack.empty()) {
      const long k = stack.back();
      stack.pop_back();
      const long i = k / n;
      const long j = k % n;
      for (long di = -1; di <= 1; ++di) {
        for (long dj = -1; dj <= 1; ++dj) {
          const long ii = i + di;
          const long jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
          const long kk = ii * n + jj;
          if (raster.values[kk] && !lab[kk]) {
            lab[kk] = count;
            stack.push_back(kk);
          }
        }
      }
    }
  }
  if (labels) *labels = std::move(lab);
  return static_cast<std::size_t>(count);
}

bool is_continuous(const BinaryRaster& pred) {
  if (label_components(pred) != 1) return false;
  for (std::size_t i = 0; i < pred.n; ++i) {
    if (pred.at(i, 0)) return true;
  }
  return false;
}

PathLabel classify(const BinaryRaster& pred, const BinaryRaster& truth, double cutoff) {
  return evaluate_pair(pred, truth, cutoff).label;
}

MetricsReport evaluate_pair(const BinaryRaster& pred, const BinaryRaster& truth, double cutoff) {
  auto r = f1_score(pred, truth);
  r.continuous = is_continuous(pred);
  if (!r.continuous) {
    r.label = PathLabel::Incorrect;
  } else {
    r.label = r.f1 >= cutoff ? PathLabel::Correct : PathLabel::PlausibleAlternative;
  }
  return r;
}

std::vector<double> threshold_sweep(std::span<const PredictionPair> pairs, std::span<const double> cutoffs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyCollection, "threshold sweep needs predictions");
  std::vector<double> f1;
  std::vector<bool> continuous;
  for (const auto& p : pairs) {
    const auto r = f1_score(p.pred, p.truth);
    f1.push_back(r.f1);
    continuous.push_back(is_continuous(p.pred));
  }
  std::vector<double> out;
  out.reserve(cutoffs.size());
  for (double cutoff : cutoffs) {
    std::size_t correct = 0;
    for (std::size_t k = 0; k < f1.size(); ++k) {
      if (continuous[k] && f1[k] >= cutoff) ++correct;
    }
    out.push_back(static_cast<double>(correct) / static_cast<double>(f1.size()));
  }
  return out;
}

DisplacementErrors displacement_errors(std::span<const DisplacementGrid> preds,
                                       std::span<const DisplacementGrid> truths) {
  if (preds.empty() || truths.empty()) throw Error(ErrorCode::EmptyCollection, "no displacement samples");
  if (preds.size() != truths.size()) throw Error(ErrorCode::ShapeMismatch, "prediction and truth counts differ");

  DisplacementErrors out;
  double norm_sum = 0.0;
  for (std::size_t s = 0; s < preds.size(); ++s) {
    const auto& p = preds[s];
    const auto& t = truths[s];
    check_shapes(p.ux, t.ux);
    check_shapes(p.uy, t.uy);
    check_shapes(t.ux, t.uy);
    const double count = static_cast<double>(t.ux.values.size());
    double ex = 0.0, ey = 0.0, et = 0.0, mag = 0.0;
    for (std::size_t k = 0; k < t.ux.values.size(); ++k) {
      const double dx = p.ux.values[k] - t.ux.values[k];
      const double dy = p.uy.values[k] - t.uy.values[k];
      ex += std::abs(dx);
      ey += std::abs(dy);
      et += std::hypot(dx, dy);
      mag += std::hypot(t.ux.values[k], t.uy.values[k]);
    }
    out.mae_x.push_back(ex / count);
    out.mae_y.push_back(ey / count);
    out.mae_total.push_back(et / count);
    norm_sum += mag / count;
  }
  const double samples = static_cast<double>(preds.size());
  out.normalizer = norm_sum / samples;
  if (!(out.normalizer > 0.0)) throw Error(ErrorCode::ZeroNormalizer, "all truth displacements are zero");

  for (std::size_t s = 0; s < preds.size(); ++s) {
    out.ape.push_back(out.mae_total[s] / out.normalizer);
    out.mean_mae_x += out.mae_x[s] / samples;
    out.mean_mae_y += out.mae_y[s] / samples;
    out.mean_mae_total += out.mae_total[s] / samples;
    out.mape += out.ape[s] / samples;
  }
  return out;
}

EvaluationSummary summarize(std::span<const MetricsReport> reports) {
  EvaluationSummary s;
  s.count = reports.size();
  if (reports.empty()) return s;
  double f1_cont = 0.0, f1_disc = 0.0;
  std::size_t correct = 0, plausible = 0, incorrect = 0;
  for (const auto& r : reports) {
    s.mean_f1 += r.f1;
    s.mean_wrong_pixels += static_cast<double>(r.wrong_pixels);
    if (r.continuous) {
      ++s.continuous_count;
      f1_cont += r.f1;
    } else {
      f1_disc += r.f1;
    }
    switch (r.label) {
      case PathLabel::Correct: ++correct; break;
      case PathLabel::PlausibleAlternative: ++plausible; break;
      case PathLabel::Incorrect: ++incorrect; break;
    }
  }
  const double n = static_cast<double>(s.count);
  s.mean_f1 /= n;
  s.mean_wrong_pixels /= n;
  const std::size_t disc = s.count - s.continuous_count;
  s.mean_f1_continuous = s.continuous_count ? f1_cont / static_cast<double>(s.continuous_count) : 0.0;
  s.mean_f1_discontinuous = disc ? f1_disc / static_cast<double>(disc) : 0.0;
  s.fraction_correct = static_cast<double>(correct) / n;
  s.fraction_plausible = static_cast<double>(plausible) / n;
  s.fraction_incorrect = static_cast<double>(incorrect) / n;
  return s;
}

}  // namespace crackpath
