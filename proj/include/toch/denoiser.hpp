#pragma once

#include "toch/toch_field.hpp"
#include "toch/weights.hpp"

namespace toch {

/// One latent vector per frame (rows), Z = 2 * gru_hidden columns.
using LatentSequence = Eigen::MatrixXf;

/// Per frame: point features (c, d, y, o, n) pass through the PointNet
/// blocks (per-point affine + ReLU, max-pool, pooled feature concatenated to
/// every point before the next block); the last pooled feature goes through
/// an affine + ReLU layer to the frame feature; a bidirectional GRU over
/// frames gives z_i = [forward h_i, backward h_i].
LatentSequence encode(const WeightContainer& weights, const TochSequence& seq);

/// Per point: (z_i, o, n) through the decoder stack (affine + ReLU) and a
/// linear head to (logit, d, y). c = 1 iff sigmoid(logit) >= 0.5; c = 0
/// entries get the null values.
TochSequence decode(const WeightContainer& weights, const LatentSequence& latents,
                    const PointSetPtr& points);

TochSequence denoise(const WeightContainer& weights, const TochSequence& seq);

/// Decode the source sequence's latents onto a different object's points.
TochSequence transfer(const WeightContainer& weights, const TochSequence& source,
                      const PointSetPtr& target_points);

/// Training-free smoother: per point, c by majority over a centered window
/// (ties keep the center frame), d and y by the mean over window frames with
/// c = 1. Windows are truncated at the sequence ends.
TochSequence baseline_smooth(const TochSequence& seq, int window);

}  // namespace toch
