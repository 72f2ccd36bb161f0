#include "toch/denoiser.hpp"

#include "toch/error.hpp"

#include <cmath>

namespace toch {

namespace {

using MatF = Eigen::MatrixXf;
using VecF = Eigen::VectorXf;

MatF relu(const MatF& m) { return m.cwiseMax(0.0f); }

float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

MatF point_features(const TochFrame& frame) {
  const int n = frame.size();
  MatF x(n, 11);
  const auto& p = *frame.points;
  for (int i = 0; i < n; ++i) {
    const bool c = frame.c[i] != 0;
    x(i, 0) = c ? 1.0f : 0.0f;
    x(i, 1) = c ? static_cast<float>(frame.d[i]) : 0.0f;
    for (int k = 0; k < 3; ++k) {
      x(i, 2 + k) = c ? static_cast<float>(frame.y(i, k)) : 0.0f;
      x(i, 5 + k) = static_cast<float>(p.points(i, k));
      x(i, 8 + k) = static_cast<float>(p.normals(i, k));
    }
  }
  return x;
}

VecF frame_feature(const WeightContainer& w, const MatF& x) {
  const auto& hp = w.hyperparameters();
  MatF input = x;
  VecF pooled;
  for (std::size_t k = 0; k < hp.pointnet_widths.size(); ++k) {
    const std::string prefix = "enc.block" + std::to_string(k);
    const MatF h = relu((input * w.tensor(prefix + ".weight").transpose()).rowwise() +
                        w.vector(prefix + ".bias").transpose());
    pooled = h.colwise().maxCoeff().transpose();
    if (k + 1 < hp.pointnet_widths.size()) {
      input.resize(h.rows(), 2 * h.cols());
      input.leftCols(h.cols()) = h;
      input.rightCols(h.cols()) = pooled.transpose().replicate(h.rows(), 1);
    }
  }
  return relu(w.tensor("enc.global.weight") * pooled + w.vector("enc.global.bias"));
}

/// PyTorch GRU cell, gate order (r, z, n).
VecF gru_step(const WeightContainer& w, const std::string& suffix, const VecF& x, const VecF& h) {
  const int hs = static_cast<int>(h.size());
  const VecF gi = w.tensor("gru.weight_ih_" + suffix) * x + w.vector("gru.bias_ih_" + suffix);
  const VecF gh = w.tensor("gru.weight_hh_" + suffix) * h + w.vector("gru.bias_hh_" + suffix);
  VecF out(hs);
  for (int k = 0; k < hs; ++k) {
    const float r = sigmoid(gi[k] + gh[k]);
    const float z = sigmoid(gi[hs + k] + gh[hs + k]);
    const float n = std::tanh(gi[2 * hs + k] + r * gh[2 * hs + k]);
    out[k] = (1.0f - z) * n + z * h[k];
  }
  return out;
}

}  // namespace

LatentSequence encode(const WeightContainer& weights, const TochSequence& seq) {
  seq.validate();
  const auto& hp = weights.hyperparameters();
  const int t = seq.size();
  if (t < 1) fail(ErrorCode::InvalidArgument, "cannot encode an empty sequence");
  if (seq.point_count() < 1) fail(ErrorCode::InvalidArgument, "cannot encode fields without points");

  MatF features(t, hp.global_feature);
  for (int i = 0; i < t; ++i) {
    features.row(i) = frame_feature(weights, point_features(seq.frames[i])).transpose();
  }
  const int hs = hp.gru_hidden;
  LatentSequence z(t, hp.latent);
  VecF h = VecF::Zero(hs);
  for (int i = 0; i < t; ++i) {
    h = gru_step(weights, "l0", features.row(i).transpose(), h);
    z.row(i).head(hs) = h.transpose();
  }
  h = VecF::Zero(hs);
  for (int i = t - 1; i >= 0; --i) {
    h = gru_step(weights, "l0_reverse", features.row(i).transpose(), h);
    z.row(i).tail(hs) = h.transpose();
  }
  return z;
}

TochSequence decode(const WeightContainer& weights, const LatentSequence& latents,
                    const PointSetPtr& points) {
  const auto& hp = weights.hyperparameters();
  if (latents.cols() != hp.latent) {
    fail(ErrorCode::WeightMismatch, "latent width " + std::to_string(latents.cols()) +
                                        " does not match the decoder (" +
                                        std::to_string(hp.latent) + ")");
  }
  if (!points) fail(ErrorCode::InvalidArgument, "decode needs an object point set");
  const int n = points->size();
  const int z = hp.latent;

  // First layer splits into a per-frame latent part and a per-point
  // geometry part that is shared by all frames.
  const TensorF& w0 = weights.tensor("dec.layer0.weight");
  MatF geometry(n, Hyperparameters::kPointGeometry);
  geometry.leftCols(3) = points->points.cast<float>();
  geometry.rightCols(3) = points->normals.cast<float>();
  const MatF geometry_term = geometry * w0.rightCols(Hyperparameters::kPointGeometry).transpose();
  const VecF b0 = weights.vector("dec.layer0.bias");

  TochSequence out;
  out.points = points;
  out.frames.reserve(latents.rows());
  for (Eigen::Index i = 0; i < latents.rows(); ++i) {
    const VecF latent_term = w0.leftCols(z) * latents.row(i).transpose() + b0;
    MatF h = relu(geometry_term.rowwise() + latent_term.transpose());
    for (std::size_t k = 1; k < hp.decoder_widths.size(); ++k) {
      const std::string prefix = "dec.layer" + std::to_string(k);
      h = relu((h * weights.tensor(prefix + ".weight").transpose()).rowwise() +
               weights.vector(prefix + ".bias").transpose());
    }
    const MatF y = (h * weights.tensor("dec.head.weight").transpose()).rowwise() +
                   weights.vector("dec.head.bias").transpose();

    TochFrame f = TochFrame::empty(points);
    for (int p = 0; p < n; ++p) {
      if (!(sigmoid(y(p, 0)) >= 0.5f)) continue;
      f.c[p] = 1;
      f.d[p] = y(p, 1);
      for (int k = 0; k < 3; ++k) f.y(p, k) = y(p, 2 + k);
    }
    out.frames.push_back(std::move(f));
  }
  return out;
}

TochSequence denoise(const WeightContainer& weights, const TochSequence& seq) {
  return decode(weights, encode(weights, seq), seq.points);
}

TochSequence transfer(const WeightContainer& weights, const TochSequence& source,
                      const PointSetPtr& target_points) {
  return decode(weights, encode(weights, source), target_points);
}

TochSequence baseline_smooth(const TochSequence& seq, int window) {
  if (window < 1 || window % 2 == 0) {
    fail(ErrorCode::InvalidArgument, "smoothing window must be odd and >= 1");
  }
  seq.validate();
  const int t = seq.size();
  const int n = seq.point_count();
  const int half = window / 2;
  TochSequence out;
  out.points = seq.points;
  out.frames.reserve(t);
  for (int i = 0; i < t; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(t - 1, i + half);
    const int span = hi - lo + 1;
    TochFrame f = TochFrame::empty(seq.points);
    for (int p = 0; p < n; ++p) {
      int votes = 0;
      for (int k = lo; k <= hi; ++k) votes += seq.frames[k].c[p] != 0;
      const bool keep = 2 * votes > span || (2 * votes == span && seq.frames[i].c[p] != 0);
      if (!keep) continue;
      // Incremental mean: exact when the window is constant.
      double d = 0.0;
      Vec3 y = Vec3::Zero();
      int used = 0;
      for (int k = lo; k <= hi; ++k) {
        if (!seq.frames[k].c[p]) continue;
        ++used;
        d += (seq.frames[k].d[p] - d) / used;
        y += (seq.frames[k].y.row(p).transpose() - y) / used;
      }
      f.c[p] = 1;
      f.d[p] = d;
      f.y.row(p) = y.transpose();
    }
    out.frames.push_back(std::move(f));
  }
  return out;
}

}  // namespace toch
