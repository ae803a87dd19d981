#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "microbeam/dsp.hpp"

namespace microbeam {

// Per-look-angle 2D-PCA model: training-mean dB image plus the K dominant
// eigenvectors (columns, orthonormal, eigenvalue-descending) of the T x T
// image covariance sum_i S_i^T S_i.
struct PcaModel {
    Eigen::MatrixXd mean_image;   // F x T
    Eigen::MatrixXd basis;        // T x K
    Eigen::VectorXd eigenvalues;  // K, non-increasing
    int k = 0;
};

// Concatenation of the two projected spectrograms; the classifier input.
struct FusedFeature {
    Eigen::VectorXd values;  // length 2 * F * K
    int label = 0;           // 0 = unlabeled
};

using SpectrogramPair = std::pair<Spectrogram, Spectrogram>;

// 10*log10 with a 60 dB floor relative to the image's own peak.
Eigen::MatrixXd to_db(const Eigen::MatrixXd& power);

// dB image minus the training mean image.
Eigen::MatrixXd normalize(const Spectrogram& spec, const Eigen::MatrixXd& mean_image);

// sum_i S_i^T S_i accumulated as a pairwise tree reduction in index order,
// so the result is bit-identical however the terms were produced.
Eigen::MatrixXd covariance_from_images(const std::vector<Eigen::MatrixXd>& images);

// K eigenpairs of a symmetric PSD matrix with the largest eigenvalues,
// sorted non-increasing, sign-canonicalized (largest-magnitude component
// positive, first such component on ties).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> dominant_eigenpairs(
    const Eigen::MatrixXd& covariance, int k);

// One model per look angle; both classes pool into each covariance.
std::pair<PcaModel, PcaModel> fit(const std::vector<SpectrogramPair>& training, int k);

// normalize(spec, model.mean_image) * model.basis -> F x K.
Eigen::MatrixXd project(const Spectrogram& spec, const PcaModel& model);

// Column-major vectorization of both projections, A first.
FusedFeature fuse(const Eigen::MatrixXd& proj_a, const Eigen::MatrixXd& proj_b);

}  // namespace microbeam
