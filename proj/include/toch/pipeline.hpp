#pragma once

#include "toch/error.hpp"
#include "toch/fitter.hpp"
#include "toch/metrics.hpp"
#include "toch/toch_field.hpp"
#include "toch/weights.hpp"

#include <functional>
#include <string>

namespace toch {

/// Maps a noisy field sequence to a denoised one on the same point set.
using FieldDenoiser = std::function<TochSequence(const TochSequence&)>;

FieldDenoiser model_denoiser(WeightContainer weights);
FieldDenoiser baseline_denoiser(int window);

struct RefineOptions {
  ExtractionOptions extraction;
  FitConfig fit;
  MetricOptions metrics;
};

struct RefineResult {
  TochSequence input_field;
  TochSequence denoised_field;
  HandSequence refined;
  FitReport fit;
  MetricReport input_metrics;    // input vs itself: its IV, C-IoU 100
  MetricReport refined_metrics;  // refined vs input
  std::string report_json() const;
};

/// extract -> denoise -> fit, initialized at `input`. Errors are rethrown
/// with the stage name prefixed.
RefineResult refine_sequence(const HandModel& model, const TriMesh& object,
                             const HandSequence& input, const FieldDenoiser& denoiser,
                             const RefineOptions& options);

/// Extract on the source object, re-decode on points sampled from `target`
/// (same count and seed), fit from the source poses.
struct TransferResult {
  TochSequence source_field;
  TochSequence target_field;
  HandSequence transferred;
  FitReport fit;
};
using FieldTransfer = std::function<TochSequence(const TochSequence&, const PointSetPtr&)>;
FieldTransfer model_transfer(WeightContainer weights);

TransferResult transfer_sequence(const HandModel& model, const TriMesh& source_object,
                                 const HandSequence& source, const TriMesh& target_object,
                                 const FieldTransfer& mapper, const RefineOptions& options);

std::string fit_report_json(const FitReport& report);

/// Runs fn and prefixes any error message with the stage name.
template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    fail(e.code(), std::string(stage) + ": " + e.what());
  }
}

}  // namespace toch
