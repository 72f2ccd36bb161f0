#include "toch/pipeline.hpp"

#include "toch/denoiser.hpp"

#include <json.hpp>

namespace toch {

using nlohmann::json;

FieldDenoiser model_denoiser(WeightContainer weights) {
  return [w = std::move(weights)](const TochSequence& seq) { return denoise(w, seq); };
}

FieldDenoiser baseline_denoiser(int window) {
  return [window](const TochSequence& seq) { return baseline_smooth(seq, window); };
}

FieldTransfer model_transfer(WeightContainer weights) {
  return [w = std::move(weights)](const TochSequence& seq, const PointSetPtr& target) {
    return transfer(w, seq, target);
  };
}

namespace {

json stage_json(const StageReport& s) {
  auto reg = [](const RegTerms& t) {
    return json{{"shape", t.shape}, {"pose", t.pose}, {"velocity", t.velocity},
                {"acceleration", t.acceleration}};
  };
  return json{{"name", s.name},
              {"iterations", s.iterations},
              {"initial", {{"corr", s.initial_corr}, {"reg", reg(s.initial_reg)}, {"total", s.initial_total()}}},
              {"final", {{"corr", s.final_corr}, {"reg", reg(s.final_reg)}, {"total", s.final_total()}}}};
}

json fit_json(const FitReport& report) {
  json stages = json::array();
  for (const auto& s : report.stages) stages.push_back(stage_json(s));
  return json{{"stages", stages},
              {"correspondences", report.correspondences},
              {"residual_mean_m", report.residual_mean},
              {"residual_max_m", report.residual_max}};
}

}  // namespace

std::string fit_report_json(const FitReport& report) { return fit_json(report).dump(2); }

std::string RefineResult::report_json() const {
  json doc;
  doc["input"] = json::parse(input_metrics.to_json());
  doc["refined_vs_input"] = json::parse(refined_metrics.to_json());
  doc["fit"] = fit_json(fit);
  return doc.dump(2);
}

RefineResult refine_sequence(const HandModel& model, const TriMesh& object,
                             const HandSequence& input, const FieldDenoiser& denoiser,
                             const RefineOptions& options) {
  RefineResult r;
  r.input_field = with_stage("extract", [&] {
    return extract_sequence(model, input, object, options.extraction);
  });
  r.denoised_field = with_stage("denoise", [&] {
    TochSequence out = denoiser(r.input_field);
    out.validate();
    if (out.size() != r.input_field.size() || out.points != r.input_field.points) {
      fail(ErrorCode::PointSetMismatch, "denoised field does not match the input field layout");
    }
    return out;
  });
  FitResult fit = with_stage("fit", [&] { return fit_sequence(model, r.denoised_field, input, options.fit); });
  r.refined = std::move(fit.sequence);
  r.fit = std::move(fit.report);
  with_stage("metrics", [&] {
    r.input_metrics = evaluate_sequences(model, input, input, object, r.input_field.points,
                                         options.metrics, options.extraction.eps);
    r.refined_metrics = evaluate_sequences(model, r.refined, input, object, r.input_field.points,
                                           options.metrics, options.extraction.eps);
  });
  return r;
}

TransferResult transfer_sequence(const HandModel& model, const TriMesh& source_object,
                                 const HandSequence& source, const TriMesh& target_object,
                                 const FieldTransfer& mapper, const RefineOptions& options) {
  TransferResult r;
  r.source_field = with_stage("extract", [&] {
    return extract_sequence(model, source, source_object, options.extraction);
  });
  r.target_field = with_stage("transfer", [&] {
    auto points = std::make_shared<const ObjectPointSet>(sample_surface(
        target_object, options.extraction.n_points, options.extraction.seed));
    TochSequence out = mapper(r.source_field, points);
    out.validate();
    if (out.size() != r.source_field.size() || out.points != points) {
      fail(ErrorCode::PointSetMismatch, "transferred field is not on the target point set");
    }
    return out;
  });
  FitResult fit = with_stage("fit", [&] { return fit_sequence(model, r.target_field, source, options.fit); });
  r.transferred = std::move(fit.sequence);
  r.fit = std::move(fit.report);
  return r;
}

}  // namespace toch
