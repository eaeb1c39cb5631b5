#include "bcreg/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "bcreg/rng.hpp"

namespace bcreg {

FeatureBackend FeatureBackend::oracle(std::uint64_t seed, int dim) {
  FeatureBackend b;
  b.kind = FeatureBackendKind::kOracle;
  b.seed = seed;
  b.oracle_dim = dim;
  return b;
}

FeatureBackend FeatureBackend::handcrafted() {
  FeatureBackend b;
  b.kind = FeatureBackendKind::kHandcrafted;
  return b;
}

FeatureBackend FeatureBackend::precomputed(std::string source_path, std::string target_path) {
  FeatureBackend b;
  b.kind = FeatureBackendKind::kPrecomputed;
  b.path = std::move(source_path);
  b.target_path = std::move(target_path);
  return b;
}

FeatureBackend FeatureBackend::with_path(const std::string& p) const {
  FeatureBackend b = *this;
  b.path = p;
  b.target_path.clear();
  return b;
}

namespace {

// Unit vector row; rows already within 1e-9 of unit norm are left untouched
// so that saved files reload bit-identically.
void normalize_row(Eigen::MatrixXd& m, long i) {
  const double norm = m.row(i).norm();
  if (norm < 1e-12) {
    m.row(i).setZero();
    m(i, 0) = 1.0;
    return;
  }
  if (std::abs(norm - 1.0) > 1e-9) m.row(i) /= norm;
}

FeatureSet oracle_features(const FeatureBackend& b, const PointCloud& c,
                           const std::vector<int>& ids) {
  if (!ids.empty() && ids.size() != c.size()) {
    throw std::invalid_argument("extract_features: correspondence id count != cloud size");
  }
  Eigen::MatrixXd m(c.size(), b.oracle_dim);
  for (long i = 0; i < m.rows(); ++i) {
    const std::uint64_t id = ids.empty() ? static_cast<std::uint64_t>(i)
                                         : static_cast<std::uint64_t>(ids[i]);
    Rng rng(mix_seed(b.seed, id));
    Eigen::VectorXd v = rng.gaussian_vec(b.oracle_dim);
    m.row(i) = v.transpose();
    normalize_row(m, i);
  }
  return {std::move(m)};
}

FeatureSet handcrafted_features(const FeatureBackend& b, const PointCloud& c) {
  const int bins = b.histogram_bins;
  const int per_radius = bins + 3 + 1;
  const int dim = static_cast<int>(b.radii.size()) * per_radius;
  const int n = static_cast<int>(c.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, dim);

  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d& q = c.points[i];
    int offset = 0;
    for (double r : b.radii) {
      const double r2 = r * r;
      // neighbors within r, excluding the point itself
      std::vector<int> nb;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        if ((c.points[j] - q).squaredNorm() <= r2) nb.push_back(j);
      }

      if (!nb.empty()) {
        // distance histogram as frequencies
        for (int j : nb) {
          const double d = (c.points[j] - q).norm();
          int bin = static_cast<int>(d / r * bins);
          bin = std::clamp(bin, 0, bins - 1);
          m(i, offset + bin) += 1.0;
        }
        m.row(i).segment(offset, bins) /= static_cast<double>(nb.size());

        // covariance eigenvalues of the neighborhood, descending, scaled by r^2
        Eigen::Vector3d mean = Eigen::Vector3d::Zero();
        for (int j : nb) mean += c.points[j];
        mean /= static_cast<double>(nb.size());
        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        for (int j : nb) {
          const Eigen::Vector3d d = c.points[j] - mean;
          cov += d * d.transpose();
        }
        cov /= static_cast<double>(nb.size());
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
        for (int e = 0; e < 3; ++e) {
          m(i, offset + bins + e) = eig.eigenvalues()[2 - e] / r2;
        }
        m(i, offset + bins + 3) = static_cast<double>(nb.size()) / static_cast<double>(n);
      }
      offset += per_radius;
    }
    normalize_row(m, i);
  }
  return {std::move(m)};
}

}  // namespace

FeatureSet extract_features(const FeatureBackend& backend, const PointCloud& c,
                            const std::vector<int>& correspondence_ids) {
  if (c.empty()) throw std::invalid_argument("extract_features: empty cloud");
  switch (backend.kind) {
    case FeatureBackendKind::kOracle:
      return oracle_features(backend, c, correspondence_ids);
    case FeatureBackendKind::kHandcrafted:
      return handcrafted_features(backend, c);
    case FeatureBackendKind::kPrecomputed: {
      FeatureSet f = load_feature_file(backend.path);
      if (static_cast<std::size_t>(f.count()) != c.size()) {
        throw std::invalid_argument("extract_features: feature file has " +
                                    std::to_string(f.count()) + " rows for a cloud of " +
                                    std::to_string(c.size()) + " points");
      }
      return f;
    }
  }
  throw std::logic_error("extract_features: unknown backend kind");
}

FeatureSet interpolate_features(const PointCloud& sub_points, const FeatureSet& sub_feats,
                                const PointCloud& dense_points) {
  if (sub_points.size() < 3) {
    throw std::invalid_argument("interpolate_features: need at least 3 subsampled points");
  }
  if (static_cast<std::size_t>(sub_feats.count()) != sub_points.size()) {
    throw std::invalid_argument("interpolate_features: feature/point count mismatch");
  }
  constexpr double kEps = 1e-8;
  Eigen::MatrixXd m(dense_points.size(), sub_feats.dim());
  for (long i = 0; i < m.rows(); ++i) {
    const IndexSubset nn = p_nearest_neighbors(sub_points, dense_points.points[i], 3);
    double w[3];
    double w_sum = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double d = (sub_points.points[nn[k]] - dense_points.points[i]).norm();
      w[k] = 1.0 / (d + kEps);
      w_sum += w[k];
    }
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(sub_feats.dim());
    for (int k = 0; k < 3; ++k) v += (w[k] / w_sum) * sub_feats.vectors.row(nn[k]);
    const double norm = v.norm();
    if (norm < 1e-12) {
      m.row(i) = sub_feats.vectors.row(nn[0]);  // cancellation; trust the nearest
    } else {
      m.row(i) = v / norm;
    }
  }
  return {std::move(m)};
}

FeatureSet gather(const FeatureSet& f, const IndexSubset& indices) {
  Eigen::MatrixXd m(indices.size(), f.dim());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= f.count()) {
      throw std::out_of_range("gather: feature index out of range");
    }
    m.row(i) = f.vectors.row(indices[i]);
  }
  return {std::move(m)};
}

FeatureSet load_feature_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feature file: " + path);
  std::string tag_d, tag_n;
  long dim = 0, count = 0;
  in >> tag_d >> dim >> tag_n >> count;
  if (!in || tag_d != "D" || tag_n != "N" || dim < 1 || count < 1) {
    throw std::runtime_error("malformed feature file header in " + path +
                             " (expected \"D <dim> N <count>\")");
  }
  Eigen::MatrixXd m(count, dim);
  for (long i = 0; i < count; ++i) {
    for (long j = 0; j < dim; ++j) {
      if (!(in >> m(i, j))) {
        throw std::runtime_error(path + ": truncated or non-numeric value at row " +
                                 std::to_string(i + 1));
      }
    }
  }
  for (long i = 0; i < count; ++i) {
    if (m.row(i).norm() < 1e-12) {
      throw std::runtime_error(path + ": zero feature vector at row " + std::to_string(i + 1));
    }
    normalize_row(m, i);
  }
  return {std::move(m)};
}

void save_feature_file(const std::string& path, const FeatureSet& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write feature file: " + path);
  out << "D " << f.dim() << " N " << f.count() << "\n";
  char buf[32];
  for (long i = 0; i < f.count(); ++i) {
    for (long j = 0; j < f.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", f.vectors(i, j));
      out << (j ? " " : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing feature file: " + path);
}

}  // namespace bcreg
