#ifndef DRAWRES_CLUSTERING_HPP
#define DRAWRES_CLUSTERING_HPP

#include <cstdint>

#include "drawres/core.hpp"

namespace drawres {

struct SubtractiveParams {
  double radius = 0.5;        // influence radius in the unit hypercube
  double squash = 1.5;        // neighborhood radius = squash * radius
  double accept_ratio = 0.5;  // accept outright above this fraction of the first potential
  double reject_ratio = 0.15; // stop below this fraction
  int max_centers = 0;        // 0 means unlimited
};

/// Potential-based cluster centers (rows, in the units of X). Columns are scaled
/// to [0, 1] internally; a constant column maps to 0. Returns at least one center.
MatrixXd subtractive_clusters(const Ref<const MatrixXd> &X, const SubtractiveParams &params = {});

struct FcmParams {
  int clusters = 2;
  double exponent = 2.0; // partition matrix exponent, > 1
  int max_iter = 100;
  double tol = 1e-6;     // stop when no center moves farther than this
  std::uint64_t seed = 0;
};

struct FcmResult {
  MatrixXd centers;    // clusters x cols
  MatrixXd membership; // rows x clusters, each row sums to 1
  int iterations = 0;
};

/// Fuzzy c-means fixed-point iteration from a seeded random partition.
FcmResult fcm_clusters(const Ref<const MatrixXd> &X, const FcmParams &params = {});

} // namespace drawres

#endif // DRAWRES_CLUSTERING_HPP
