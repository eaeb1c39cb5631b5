#pragma once

#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "bcreg/features.hpp"

namespace bcreg {

// S(i,j) = fx_i . fy_j; rows index source points, columns target points.
using SimilarityMatrix = Eigen::MatrixXd;

// C = rowsoftmax(S/tau) (*) colsoftmax(S/tau); entries in (0,1), row and
// column sums each bounded by 1.
using ConsensusMatrix = Eigen::MatrixXd;

// Softmax temperature suited to unit-norm features, whose dot products live
// in [-1,1] and need sharpening that raw learned logits carry implicitly.
inline constexpr double kSharpUnitNormTau = 0.05;

struct Match {
  int source_index = 0;
  int target_index = 0;
  double confidence = 0.0;
};

// K one-to-one pairs, confidences non-increasing.
struct MatchSet {
  std::vector<Match> pairs;

  int k() const { return static_cast<int>(pairs.size()); }
};

SimilarityMatrix similarity_matrix(const FeatureSet& fx, const FeatureSet& fy);

ConsensusMatrix bilateral_consensus(const SimilarityMatrix& s, double temperature = 1.0);

// Greedy selection: repeatedly take the largest remaining entry, then
// eliminate its row and column. Ties by (lower row, lower column).
MatchSet softmax_pool_top_k(const ConsensusMatrix& c, int k);

// Row-major CSV dump of the consensus matrix, 6 significant digits.
void write_consensus_csv(std::ostream& out, const ConsensusMatrix& c);

}  // namespace bcreg
