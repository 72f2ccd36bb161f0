// Command-line front end for the TOCH toolkit.

#include "toch/demo.hpp"
#include "toch/denoiser.hpp"
#include "toch/error.hpp"
#include "toch/hand_model_io.hpp"
#include "toch/perturbation.hpp"
#include "toch/pipeline.hpp"
#include "toch/sampling.hpp"
#include "toch/sequence_io.hpp"
#include "toch/toch_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace toch;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text << '\n';
  if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

// Stores model and mesh paths relative to the directory of `out`.
void write_bundle_at(const fs::path& out, SequenceBundle bundle) {
  const fs::path dir = fs::absolute(out).parent_path();
  bundle.hand_model = fs::relative(fs::absolute(bundle.hand_model), dir);
  bundle.object_mesh = fs::relative(fs::absolute(bundle.object_mesh), dir);
  write_bundle(out, bundle);
}

struct FitFlags {
  FitConfig cfg;
  void add(CLI::App* cmd) {
    cmd->add_option("--w1", cfg.w1, "shape regularizer weight")->capture_default_str();
    cmd->add_option("--w2", cfg.w2, "pose magnitude weight")->capture_default_str();
    cmd->add_option("--w3", cfg.w3, "pose velocity weight")->capture_default_str();
    cmd->add_option("--w4", cfg.w4, "joint acceleration weight")->capture_default_str();
    cmd->add_option("--stage1-iters", cfg.stage1_iters, "iterations of the global stage")->capture_default_str();
    cmd->add_option("--stage2-iters", cfg.stage2_iters, "iterations of the full stage")->capture_default_str();
  }
};

struct ExtractFlags {
  ExtractionOptions opt;
  void add(CLI::App* cmd) {
    cmd->add_option("--n-points", opt.n_points, "object points sampled")->capture_default_str();
    cmd->add_option("--seed", opt.seed, "point sampling seed")->capture_default_str();
    cmd->add_option("--eps", opt.eps, "ray offset when casting against the object (m)")->capture_default_str();
  }
};

struct DenoiseFlags {
  std::string weights;
  bool baseline = false;
  int window = 5;
  void add(CLI::App* cmd) {
    cmd->add_option("--weights", weights, "weight manifest (JSON)");
    cmd->add_flag("--baseline", baseline, "use the training-free temporal smoother instead of weights");
    cmd->add_option("--window", window, "smoother window (odd)")->capture_default_str();
  }
  FieldDenoiser make() const {
    if (baseline) return baseline_denoiser(window);
    if (weights.empty()) fail(ErrorCode::InvalidArgument, "--weights is required unless --baseline is given");
    return model_denoiser(WeightContainer::load(weights));
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TOCH: hand-object correspondence fields for refining hand tracking"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();

  // sample-points
  auto* sample = app.add_subcommand("sample-points", "sample an object point set (TOCH file with no frames)");
  std::string mesh_path, out_path;
  int n_points = kDefaultPointCount;
  std::uint64_t seed = 0;
  sample->add_option("--mesh", mesh_path, "object OBJ")->required();
  sample->add_option("--n", n_points, "points")->capture_default_str();
  sample->add_option("--seed", seed, "sampling seed")->capture_default_str();
  sample->add_option("--out", out_path, "output TOCH file")->required();

  // extract
  auto* extract = app.add_subcommand("extract", "extract TOCH fields of a sequence");
  std::string bundle_path;
  ExtractFlags extract_flags;
  extract->add_option("--bundle", bundle_path, "sequence file")->required();
  extract_flags.add(extract);
  extract->add_option("--out", out_path, "output TOCH file")->required();

  // perturb
  auto* perturb = app.add_subcommand("perturb", "add synthetic tracking noise to a sequence");
  std::string kind_name = "balanced";
  NoiseSpec noise;
  perturb->add_option("--bundle", bundle_path, "sequence file")->required();
  perturb->add_option("--kind", kind_name, "translation | pose | balanced")->capture_default_str();
  perturb->add_option("--sigma-trans", noise.sigma_trans, "translation sigma (m)")->capture_default_str();
  perturb->add_option("--sigma-pose", noise.sigma_pose, "axis-angle sigma (rad)")->capture_default_str();
  perturb->add_option("--seed", noise.seed, "noise seed")->capture_default_str();
  perturb->add_option("--out", out_path, "output sequence file")->required();

  // denoise
  auto* denoise_cmd = app.add_subcommand("denoise", "denoise a TOCH field file");
  std::string field_path;
  DenoiseFlags denoise_flags;
  denoise_cmd->add_option("--field", field_path, "input TOCH file")->required();
  denoise_flags.add(denoise_cmd);
  denoise_cmd->add_option("--out", out_path, "output TOCH file")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "fit hand parameters to a TOCH field");
  std::string init_path, model_path, report_path;
  FitFlags fit_flags;
  fit->add_option("--init", init_path, "initial sequence file")->required();
  fit->add_option("--field", field_path, "TOCH file")->required();
  fit->add_option("--model", model_path, "hand model JSON (default: the one named by --init)");
  fit_flags.add(fit);
  fit->add_option("--report", report_path, "optional JSON fit report");
  fit->add_option("--out", out_path, "output sequence file")->required();

  // refine
  auto* refine = app.add_subcommand("refine", "extract, denoise and fit a tracked sequence");
  std::string obj_dir;
  refine->add_option("--bundle", bundle_path, "sequence file")->required();
  extract_flags.add(refine);
  denoise_flags.add(refine);
  fit_flags.add(refine);
  refine->add_option("--report", report_path, "before/after JSON report");
  refine->add_option("--export-obj", obj_dir, "directory for one OBJ per refined frame");
  refine->add_option("--out", out_path, "output sequence file")->required();

  // metrics
  auto* metrics = app.add_subcommand("metrics", "compare a predicted sequence with groundtruth");
  std::string pred_path, gt_path;
  MetricOptions metric_opt;
  ExtractFlags metric_extract;
  metrics->add_option("--pred", pred_path, "predicted sequence file")->required();
  metrics->add_option("--gt", gt_path, "groundtruth sequence file")->required();
  metrics->add_flag("--procrustes", metric_opt.procrustes, "rigidly align each frame before MPJPE/MPVPE");
  metrics->add_option("--voxel-edge", metric_opt.voxel_edge, "IV voxel edge (m)")->capture_default_str();
  metrics->add_option("--tau", metric_opt.tau, "contact distance threshold (m)")->capture_default_str();
  metric_extract.add(metrics);
  metrics->add_option("--out", out_path, "output JSON report")->required();

  // transfer
  auto* transfer_cmd = app.add_subcommand("transfer", "transfer a sequence's interaction to another object");
  std::string target_path, weights_path;
  transfer_cmd->add_option("--bundle", bundle_path, "source sequence file")->required();
  transfer_cmd->add_option("--target", target_path, "target object OBJ")->required();
  transfer_cmd->add_option("--weights", weights_path, "weight manifest (JSON)")->required();
  extract_flags.add(transfer_cmd);
  fit_flags.add(transfer_cmd);
  transfer_cmd->add_option("--out", out_path, "output sequence file")->required();

  // make-demo
  auto* demo = app.add_subcommand("make-demo", "write the synthetic demo fixture set");
  int frames = 30;
  std::uint64_t demo_seed = 0;
  demo->add_option("--frames", frames, "sequence length")->capture_default_str();
  demo->add_option("--seed", demo_seed, "noise and weight seed")->capture_default_str();
  demo->add_option("--out", out_path, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[InvalidArgument]: " << e.what() << '\n';
    return 2;
  }

  try {
    extract_flags.opt.threads = threads;
    metric_extract.opt.threads = threads;
    metric_opt.threads = threads;
    fit_flags.cfg.threads = threads;

    if (*sample) {
      const TriMesh mesh = read_obj(mesh_path);
      TochSequence seq;
      seq.points = std::make_shared<const ObjectPointSet>(sample_surface(mesh, n_points, seed));
      write_toch(out_path, seq);
    } else if (*extract) {
      const LoadedBundle b = load_bundle(bundle_path);
      write_toch(out_path, with_stage("extract", [&] {
                   return extract_sequence(b.model, b.bundle.sequence, b.object, extract_flags.opt);
                 }));
    } else if (*perturb) {
      const auto kind = parse_noise_kind(kind_name);
      if (!kind) fail(ErrorCode::InvalidArgument, "unknown noise kind '" + kind_name + "'");
      noise.kind = *kind;
      LoadedBundle b = load_bundle(bundle_path);
      b.bundle.sequence = perturb_sequence(b.bundle.sequence, noise);
      write_bundle_at(out_path, b.bundle);
    } else if (*denoise_cmd) {
      const FieldDenoiser denoiser = denoise_flags.make();
      const TochSequence in = read_toch(field_path);
      write_toch(out_path, with_stage("denoise", [&] { return denoiser(in); }));
    } else if (*fit) {
      SequenceBundle init = read_bundle(init_path);
      if (!model_path.empty()) init.hand_model = fs::absolute(model_path);
      const HandModel model = read_hand_model(init.hand_model);
      const TochSequence field = read_toch(field_path);
      FitResult r = with_stage("fit", [&] { return fit_sequence(model, field, init.sequence, fit_flags.cfg); });
      init.sequence = r.sequence;
      write_bundle_at(out_path, init);
      if (!report_path.empty()) write_text(report_path, fit_report_json(r.report));
    } else if (*refine) {
      const FieldDenoiser denoiser = denoise_flags.make();
      LoadedBundle b = load_bundle(bundle_path);
      RefineOptions opt;
      opt.extraction = extract_flags.opt;
      opt.fit = fit_flags.cfg;
      opt.metrics = metric_opt;
      RefineResult r = refine_sequence(b.model, b.object, b.bundle.sequence, denoiser, opt);
      b.bundle.sequence = r.refined;
      write_bundle_at(out_path, b.bundle);
      if (!report_path.empty()) write_text(report_path, r.report_json());
      if (!obj_dir.empty()) {
        fs::create_directories(obj_dir);
        for (int i = 0; i < r.refined.size(); ++i) {
          char name[32];
          std::snprintf(name, sizeof(name), "frame_%04d.obj", i);
          write_obj(fs::path(obj_dir) / name, skin(b.model, r.refined.frames[i]));
        }
      }
    } else if (*metrics) {
      const LoadedBundle pred = load_bundle(pred_path);
      const LoadedBundle gt = load_bundle(gt_path);
      if (pred.bundle.sequence.size() != gt.bundle.sequence.size()) {
        fail(ErrorCode::InvalidArgument, "prediction and groundtruth differ in frame count");
      }
      const auto points = std::make_shared<const ObjectPointSet>(
          sample_surface(gt.object, metric_extract.opt.n_points, metric_extract.opt.seed));
      const MetricReport report =
          evaluate_sequences(gt.model, pred.bundle.sequence, gt.bundle.sequence, gt.object, points,
                             metric_opt, metric_extract.opt.eps);
      write_text(out_path, report.to_json());
    } else if (*transfer_cmd) {
      LoadedBundle b = load_bundle(bundle_path);
      const TriMesh target = read_obj(target_path);
      RefineOptions opt;
      opt.extraction = extract_flags.opt;
      opt.fit = fit_flags.cfg;
      TransferResult r = transfer_sequence(b.model, b.object, b.bundle.sequence, target,
                                           model_transfer(WeightContainer::load(weights_path)), opt);
      b.bundle.sequence = r.transferred;
      b.bundle.object_mesh = fs::absolute(target_path);
      write_bundle_at(out_path, b.bundle);
    } else if (*demo) {
      write_demo(out_path, frames, demo_seed);
    }
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[Io]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
