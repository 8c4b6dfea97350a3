#pragma once

#include "spaam/cost.hpp"
#include "spaam/trellis.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <vector>

namespace spaam {

// Probability per pairwise association edge of the current subgraph.
using ConfidenceMap = std::map<Subgraph::Edge, double>;

/// Energy-model marginals over one window graph: the probability of edge
/// (i,a)->(i+1,b) is the e^{-C}-weighted share of tracks through (i,a) that
/// continue to (i+1,b); sums to 1 over the adjacency set of (i,a).
class MarginalConfidence {
public:
    MarginalConfidence(const TrellisGraph& graph, const std::vector<Track>& tracks,
                       const std::vector<double>& costs);

    /// Marginal probability of the edge; throws InternalError when no track
    /// passes through the source node.
    double edge_probability(int frame, int a, int b) const;
    bool has_source(int frame, int a) const;
    /// Sum of probabilities over all successors of (frame, a); 1 by
    /// construction whenever the source is covered.
    double successor_sum(int frame, int a) const;

private:
    std::map<Subgraph::Edge, double> edge_weight_;
    std::map<std::pair<int, int>, double> source_weight_;
};

struct GmmParams {
    double gamma = 0.5;      // mixing weight of the "associates" component
    Eigen::Vector4d mu0 = Eigen::Vector4d::Zero();
    Eigen::Vector4d mu1 = Eigen::Vector4d::Zero();
    Eigen::Matrix4d cov0 = Eigen::Matrix4d::Identity();
    Eigen::Matrix4d cov1 = Eigen::Matrix4d::Identity();
};

struct EmOptions {
    int max_iters = 200;
    double tol = 1e-6;       // stop when log-likelihood improves by less
    double jitter = 1e-6;    // ridge added to covariances each iteration
};

struct EmResult {
    GmmParams params;
    std::vector<double> log_likelihood;  // per accepted iteration
    int iterations = 0;
};

/// Semi-supervised EM: labeled samples have their responsibility for
/// component 1 clamped to 1; with no labels, falls back to unsupervised EM
/// and designates the component with the smaller covariance trace as the
/// "associates" component. Log-likelihood is asserted non-decreasing
/// (within 1e-9 float-noise) every iteration.
EmResult em_fit(const std::vector<Eigen::Vector4d>& labeled,
                const std::vector<Eigen::Vector4d>& unlabeled,
                const std::optional<GmmParams>& init = std::nullopt, const EmOptions& opts = {});

/// Posterior probability that the feature vector belongs to the associates
/// component; evaluated in log space.
double confidence_gmm(const GmmParams& params, const Eigen::Vector4d& f);
/// {posterior, complement}; the pair sums to 1 exactly.
std::pair<double, double> confidence_gmm_pair(const GmmParams& params, const Eigen::Vector4d& f);

struct MarginalEstimateOptions {
    int window = 3;                 // frames per marginalization window
    std::size_t enum_cap = 200000;  // above this, restrict to prefix/suffix tracks
    int max_consecutive_dummies = 2;
    double tau = 25.0;
};

/// Confidence for every edge of `sub` via per-window marginalization. Window
/// graphs use the road-reachability candidate adjacency; edges crossing
/// window boundaries and windows whose enumeration exceeds the cap fall back
/// to the prefix/suffix-restricted marginal.
ConfidenceMap estimate_confidence_marginal(const Subgraph& sub, const ProjectionCache& cache,
                                           const CostParams& params,
                                           const MarginalEstimateOptions& opts);

/// Confidence for every edge of `sub` as the GMM posterior of its features;
/// features are computed on the subgraph's own tracks.
ConfidenceMap estimate_confidence_gmm(const Subgraph& sub, const ProjectionCache& cache,
                                      const CostParams& params, const GmmParams& gmm);

/// [Gamma_m, Gamma_theta, R_d, R_theta] for every real-to-real edge of the
/// subgraph; the EM training representation.
std::vector<Eigen::Vector4d> association_features(const Subgraph& sub,
                                                  const ProjectionCache& cache,
                                                  const CostParams& params);

}  // namespace spaam
