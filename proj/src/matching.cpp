#include "bcreg/matching.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace bcreg {

SimilarityMatrix similarity_matrix(const FeatureSet& fx, const FeatureSet& fy) {
  if (fx.dim() != fy.dim()) {
    throw std::invalid_argument("similarity_matrix: feature dimension mismatch (" +
                                std::to_string(fx.dim()) + " vs " + std::to_string(fy.dim()) + ")");
  }
  return fx.vectors * fy.vectors.transpose();
}

namespace {

// Softmax along each row with max subtraction.
Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (long i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    out.row(i) = (logits.row(i).array() - m).exp();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

}  // namespace

ConsensusMatrix bilateral_consensus(const SimilarityMatrix& s, double temperature) {
  if (temperature <= 0.0) {
    throw std::invalid_argument("bilateral_consensus: temperature must be positive");
  }
  const Eigen::MatrixXd logits = s / temperature;
  const Eigen::MatrixXd by_row = row_softmax(logits);
  const Eigen::MatrixXd by_col = row_softmax(logits.transpose()).transpose();
  return by_row.cwiseProduct(by_col);
}

MatchSet softmax_pool_top_k(const ConsensusMatrix& c, int k) {
  const long rows = c.rows();
  const long cols = c.cols();
  if (k < 1 || k > std::min(rows, cols)) {
    throw std::invalid_argument("softmax_pool_top_k: k out of range");
  }

  struct Entry {
    double value;
    int i, j;
  };
  std::vector<Entry> entries;
  entries.reserve(rows * cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      entries.push_back({c(i, j), static_cast<int>(i), static_cast<int>(j)});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  std::vector<bool> row_used(rows, false), col_used(cols, false);
  MatchSet ms;
  ms.pairs.reserve(k);
  for (const Entry& e : entries) {
    if (row_used[e.i] || col_used[e.j]) continue;
    ms.pairs.push_back({e.i, e.j, e.value});
    row_used[e.i] = true;
    col_used[e.j] = true;
    if (ms.k() == k) break;
  }
  return ms;
}

void write_consensus_csv(std::ostream& out, const ConsensusMatrix& c) {
  char buf[32];
  for (long i = 0; i < c.rows(); ++i) {
    for (long j = 0; j < c.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.6g", c(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

}  // namespace bcreg
