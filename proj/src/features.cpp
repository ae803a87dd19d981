#include "microbeam/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "microbeam/errors.hpp"

namespace microbeam {

namespace {

constexpr double kDbFloorFraction = 1e-6;  // 60 dB dynamic range

Eigen::MatrixXd db_image(const Eigen::MatrixXd& power) {
    const double peak = power.maxCoeff();
    if (!(peak > 0.0)) {
        throw domain_error("all-zero spectrogram has no dB representation");
    }
    const double floor = kDbFloorFraction * peak;
    return power.cwiseMax(floor).array().log10().matrix() * 10.0;
}

// Residual check from the eigensolver acceptance tolerance.
void check_eigenpairs(const Eigen::MatrixXd& covariance, const Eigen::MatrixXd& vectors,
                      const Eigen::VectorXd& values) {
    const double scale = 1e-8 * covariance.norm();
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double residual = (covariance * vectors.col(i) - values[i] * vectors.col(i)).norm();
        if (residual > scale && residual > 1e-12) {
            throw internal_error("eigenpair residual " + std::to_string(residual) +
                                 " exceeds tolerance");
        }
    }
}

}  // namespace

Eigen::MatrixXd to_db(const Eigen::MatrixXd& power) { return db_image(power); }

Eigen::MatrixXd normalize(const Spectrogram& spec, const Eigen::MatrixXd& mean_image) {
    if (spec.power.rows() != mean_image.rows() || spec.power.cols() != mean_image.cols()) {
        throw dimension_error("spectrogram and mean image dimensions differ");
    }
    return db_image(spec.power) - mean_image;
}

Eigen::MatrixXd covariance_from_images(const std::vector<Eigen::MatrixXd>& images) {
    if (images.empty()) {
        throw domain_error("covariance needs at least one image");
    }
    const Eigen::Index t = images.front().cols();
    std::vector<Eigen::MatrixXd> partial;
    partial.reserve(images.size());
    for (const Eigen::MatrixXd& s : images) {
        if (s.rows() != images.front().rows() || s.cols() != t) {
            throw dimension_error("training images must share dimensions");
        }
        partial.push_back(s.transpose() * s);
    }
    // Pairwise tree reduction in index order.
    while (partial.size() > 1) {
        std::vector<Eigen::MatrixXd> next;
        next.reserve((partial.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < partial.size(); i += 2) {
            next.push_back(partial[i] + partial[i + 1]);
        }
        if (partial.size() % 2 == 1) {
            next.push_back(std::move(partial.back()));
        }
        partial = std::move(next);
    }
    return partial.front();
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> dominant_eigenpairs(
    const Eigen::MatrixXd& covariance, int k) {
    const Eigen::Index t = covariance.rows();
    if (covariance.cols() != t) {
        throw dimension_error("covariance must be square");
    }
    if (k < 1 || k > t) {
        throw domain_error("K must lie in [1, " + std::to_string(t) + "], got " +
                           std::to_string(k));
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
    if (solver.info() != Eigen::Success) {
        throw internal_error("eigendecomposition failed to converge");
    }

    // output must be eigenvalue-descending regardless of the backend's order
    std::vector<Eigen::Index> order(t);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return solver.eigenvalues()[a] > solver.eigenvalues()[b];
    });

    Eigen::MatrixXd vectors(t, k);
    Eigen::VectorXd values(k);
    for (int i = 0; i < k; ++i) {
        values[i] = solver.eigenvalues()[order[i]];
        Eigen::VectorXd v = solver.eigenvectors().col(order[i]);
        // Sign canonicalization: largest-magnitude component positive.
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index j = 0; j < t; ++j) {
            if (std::abs(v[j]) > best) {
                best = std::abs(v[j]);
                pivot = j;
            }
        }
        if (v[pivot] < 0.0) v = -v;
        vectors.col(i) = v;
    }
    check_eigenpairs(covariance, vectors, values);
    return {vectors, values};
}

std::pair<PcaModel, PcaModel> fit(const std::vector<SpectrogramPair>& training, int k) {
    if (training.empty()) {
        throw domain_error("PCA fit needs at least one training example");
    }

    std::pair<PcaModel, PcaModel> models;
    for (int side = 0; side < 2; ++side) {
        std::vector<Eigen::MatrixXd> db;
        db.reserve(training.size());
        for (const SpectrogramPair& pair : training) {
            const Spectrogram& s = side == 0 ? pair.first : pair.second;
            db.push_back(db_image(s.power));
        }

        Eigen::MatrixXd mean = db.front();
        for (std::size_t i = 1; i < db.size(); ++i) mean += db[i];
        mean /= static_cast<double>(db.size());

        for (Eigen::MatrixXd& s : db) s -= mean;
        const Eigen::MatrixXd covariance = covariance_from_images(db);
        auto [basis, values] = dominant_eigenpairs(covariance, k);

        PcaModel& model = side == 0 ? models.first : models.second;
        model.mean_image = std::move(mean);
        model.basis = std::move(basis);
        model.eigenvalues = std::move(values);
        model.k = k;
    }
    return models;
}

Eigen::MatrixXd project(const Spectrogram& spec, const PcaModel& model) {
    if (spec.power.cols() != model.basis.rows()) {
        throw dimension_error("spectrogram time dimension does not match the PCA basis");
    }
    return normalize(spec, model.mean_image) * model.basis;
}

FusedFeature fuse(const Eigen::MatrixXd& proj_a, const Eigen::MatrixXd& proj_b) {
    if (proj_a.rows() != proj_b.rows() || proj_a.cols() != proj_b.cols()) {
        throw dimension_error("projection dimensions differ");
    }
    FusedFeature feature;
    feature.values.resize(2 * proj_a.size());
    feature.values.head(proj_a.size()) =
        Eigen::Map<const Eigen::VectorXd>(proj_a.data(), proj_a.size());
    feature.values.tail(proj_b.size()) =
        Eigen::Map<const Eigen::VectorXd>(proj_b.data(), proj_b.size());
    return feature;
}

}  // namespace microbeam
