#include "spaam/confidence.hpp"

#include "spaam/adjacency.hpp"
#include "spaam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace spaam {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string edge_name(const Subgraph::Edge& e) {
    return "(" + std::to_string(e.frame) + "," + std::to_string(e.a) + ")->(" +
           std::to_string(e.frame + 1) + "," + std::to_string(e.b) + ")";
}

double log_gaussian(const Eigen::Vector4d& f, const Eigen::Vector4d& mu,
                    const Eigen::Matrix4d& cov) {
    Eigen::LLT<Eigen::Matrix4d> llt(cov);
    if (llt.info() != Eigen::Success) {
        Eigen::Matrix4d fixed = cov + 1e-5 * Eigen::Matrix4d::Identity();
        llt.compute(fixed);
        if (llt.info() != Eigen::Success) {
            throw InternalError("confidence: covariance not SPD after regularization");
        }
    }
    Eigen::Matrix4d l = llt.matrixL();
    double logdet = 0.0;
    for (int i = 0; i < 4; ++i) logdet += std::log(l(i, i));
    logdet *= 2.0;
    Eigen::Vector4d y = llt.matrixL().solve(f - mu);
    constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
    return -0.5 * (4.0 * kLog2Pi + logdet + y.squaredNorm());
}

double log_sum_exp(double a, double b) {
    double m = std::max(a, b);
    if (m == kNegInf) return kNegInf;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

MarginalConfidence::MarginalConfidence(const TrellisGraph& graph,
                                       const std::vector<Track>& tracks,
                                       const std::vector<double>& costs) {
    (void)graph;
    for (std::size_t k = 0; k < tracks.size(); ++k) {
        const Track& t = tracks[k];
        double w = std::exp(-costs[k]);
        for (int f = 0; f + 1 < t.length(); ++f) {
            int frame = t.start_frame + f;
            edge_weight_[{frame, t.nodes[f], t.nodes[f + 1]}] += w;
            source_weight_[{frame, t.nodes[f]}] += w;
        }
    }
}

bool MarginalConfidence::has_source(int frame, int a) const {
    return source_weight_.count({frame, a}) > 0;
}

double MarginalConfidence::edge_probability(int frame, int a, int b) const {
    auto zit = source_weight_.find({frame, a});
    if (zit == source_weight_.end()) {
        throw InternalError("marginal confidence: no track covers node (" +
                            std::to_string(frame) + "," + std::to_string(a) + ")");
    }
    auto eit = edge_weight_.find({frame, a, b});
    double w = eit == edge_weight_.end() ? 0.0 : eit->second;
    return w / zit->second;
}

double MarginalConfidence::successor_sum(int frame, int a) const {
    auto zit = source_weight_.find({frame, a});
    if (zit == source_weight_.end()) {
        throw InternalError("marginal confidence: uncovered source node");
    }
    double sum = 0.0;
    auto it = edge_weight_.lower_bound({frame, a, 0});
    for (; it != edge_weight_.end() && it->first.frame == frame && it->first.a == a; ++it) {
        sum += it->second;
    }
    return sum / zit->second;
}

// ---------------------------------------------------------------------------
// EM-fitted mixture

EmResult em_fit(const std::vector<Eigen::Vector4d>& labeled,
                const std::vector<Eigen::Vector4d>& unlabeled,
                const std::optional<GmmParams>& init, const EmOptions& opts) {
    const std::size_t nl = labeled.size(), nu = unlabeled.size();
    if (nl + nu < 4) throw InputError("em_fit: need at least 4 samples");

    {
        Eigen::Vector4d lo = Eigen::Vector4d::Constant(std::numeric_limits<double>::infinity());
        Eigen::Vector4d hi = -lo;
        auto scan = [&](const std::vector<Eigen::Vector4d>& v) {
            for (const auto& f : v) {
                if (!f.allFinite()) throw InputError("em_fit: non-finite feature");
                lo = lo.cwiseMin(f);
                hi = hi.cwiseMax(f);
            }
        };
        scan(labeled);
        scan(unlabeled);
        if ((hi - lo).maxCoeff() < 1e-12) {
            throw InputError("em_fit: degenerate data (all feature vectors identical)");
        }
    }

    auto mean_of = [](const std::vector<Eigen::Vector4d>& v) {
        Eigen::Vector4d m = Eigen::Vector4d::Zero();
        for (const auto& f : v) m += f;
        return Eigen::Vector4d(m / static_cast<double>(v.size()));
    };
    auto cov_of = [&](const std::vector<Eigen::Vector4d>& v, const Eigen::Vector4d& m) {
        Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
        for (const auto& f : v) c += (f - m) * (f - m).transpose();
        return Eigen::Matrix4d(c / static_cast<double>(v.size()));
    };

    GmmParams p;
    const Eigen::Matrix4d ridge = opts.jitter * Eigen::Matrix4d::Identity();
    const bool supervised = nl > 0;
    if (init.has_value()) {
        p = *init;
    } else if (supervised) {
        p.mu1 = mean_of(labeled);
        p.cov1 = cov_of(labeled, p.mu1) + ridge;
        const auto& other = nu > 0 ? unlabeled : labeled;
        p.mu0 = mean_of(other);
        p.cov0 = cov_of(other, p.mu0) + ridge;
        p.gamma = 0.5;
    } else {
        // Deterministic split along the principal axis of the data.
        Eigen::Vector4d m = mean_of(unlabeled);
        Eigen::Matrix4d c = cov_of(unlabeled, m) + ridge;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(c);
        Eigen::Vector4d axis = eig.eigenvectors().col(3);
        double spread = std::sqrt(std::max(eig.eigenvalues()(3), opts.jitter));
        p.mu1 = m + 0.5 * spread * axis;
        p.mu0 = m - 0.5 * spread * axis;
        p.cov0 = p.cov1 = c;
        p.gamma = 0.5;
    }

    EmResult result;
    double ll_prev = kNegInf;
    std::vector<double> resp(nu, 0.0);

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        double lg = std::log(p.gamma);
        double lg0 = std::log(1.0 - p.gamma);
        double ll = 0.0;
        for (const auto& f : labeled) ll += lg + log_gaussian(f, p.mu1, p.cov1);
        for (std::size_t i = 0; i < nu; ++i) {
            double l1 = lg + log_gaussian(unlabeled[i], p.mu1, p.cov1);
            double l0 = lg0 + log_gaussian(unlabeled[i], p.mu0, p.cov0);
            double lse = log_sum_exp(l0, l1);
            ll += lse;
            resp[i] = std::exp(l1 - lse);
        }
        if (!result.log_likelihood.empty() && ll + 1e-9 < ll_prev) {
            throw InternalError("em_fit: log-likelihood decreased at iteration " +
                                std::to_string(iter));
        }
        result.log_likelihood.push_back(ll);
        result.iterations = iter + 1;
        if (iter > 0 && ll - ll_prev < opts.tol) break;
        ll_prev = ll;

        // M-step; labeled responsibilities for component 1 are clamped to 1.
        double n1 = static_cast<double>(nl);
        double n0 = 0.0;
        Eigen::Vector4d s1 = Eigen::Vector4d::Zero(), s0 = Eigen::Vector4d::Zero();
        for (const auto& f : labeled) s1 += f;
        for (std::size_t i = 0; i < nu; ++i) {
            n1 += resp[i];
            n0 += 1.0 - resp[i];
            s1 += resp[i] * unlabeled[i];
            s0 += (1.0 - resp[i]) * unlabeled[i];
        }
        p.gamma = std::clamp(n1 / static_cast<double>(nl + nu), 1e-6, 1.0 - 1e-6);
        if (n1 > 1e-12) {
            Eigen::Vector4d mu1 = s1 / n1;
            Eigen::Matrix4d c1 = Eigen::Matrix4d::Zero();
            for (const auto& f : labeled) c1 += (f - mu1) * (f - mu1).transpose();
            for (std::size_t i = 0; i < nu; ++i) {
                c1 += resp[i] * (unlabeled[i] - mu1) * (unlabeled[i] - mu1).transpose();
            }
            p.mu1 = mu1;
            p.cov1 = c1 / n1 + ridge;
        }
        if (n0 > 1e-12) {
            Eigen::Vector4d mu0 = s0 / n0;
            Eigen::Matrix4d c0 = Eigen::Matrix4d::Zero();
            for (std::size_t i = 0; i < nu; ++i) {
                c0 += (1.0 - resp[i]) * (unlabeled[i] - mu0) * (unlabeled[i] - mu0).transpose();
            }
            p.mu0 = mu0;
            p.cov0 = c0 / n0 + ridge;
        }
    }

    // Unsupervised runs: the component with smaller parameter variance is the
    // associates component.
    if (!supervised && p.cov1.trace() > p.cov0.trace()) {
        std::swap(p.mu0, p.mu1);
        std::swap(p.cov0, p.cov1);
        p.gamma = 1.0 - p.gamma;
    }

    result.params = p;
    return result;
}

double confidence_gmm(const GmmParams& params, const Eigen::Vector4d& f) {
    double l1 = std::log(params.gamma) + log_gaussian(f, params.mu1, params.cov1);
    double l0 = std::log(1.0 - params.gamma) + log_gaussian(f, params.mu0, params.cov0);
    // Stable logistic of (l1 - l0).
    double d = l0 - l1;
    if (d > 0) {
        double e = std::exp(-d);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(d));
}

std::pair<double, double> confidence_gmm_pair(const GmmParams& params, const Eigen::Vector4d& f) {
    double p1 = confidence_gmm(params, f);
    return {p1, 1.0 - p1};
}

// ---------------------------------------------------------------------------
// Whole-subgraph estimation

namespace {

// Index of the unique track through each real node.
struct TrackIndex {
    const Subgraph* sub;
    std::map<std::pair<int, int>, int> by_node;

    explicit TrackIndex(const Subgraph& s) : sub(&s) {
        for (std::size_t k = 0; k < s.tracks.size(); ++k) {
            const Track& t = s.tracks[k];
            for (int f = 0; f < t.length(); ++f) {
                if (t.nodes[f] != 0) by_node[{t.start_frame + f, t.nodes[f]}] = static_cast<int>(k);
            }
        }
    }

    const Track* track_of(int frame, int j) const {
        auto it = by_node.find({frame, j});
        return it == by_node.end() ? nullptr : &sub->tracks[it->second];
    }

    // Successor of (frame, j) in the subgraph; dummies continue as dummies.
    int successor(int frame, int j) const {
        if (j == 0) return 0;
        const Track* t = track_of(frame, j);
        if (!t || frame + 1 > t->end_frame()) return 0;
        return t->node_at_frame(frame + 1);
    }
};

// Prefix/suffix-restricted marginal for one edge over window [ws, we]: the
// candidate tracks share the subgraph's prefix before the edge and follow the
// subgraph's successors after the reassigned transition.
double restricted_probability(const Subgraph::Edge& e, int ws, int we, const TrackIndex& index,
                              const ProjectionCache& cache, const CostParams& params,
                              double tau) {
    if (e.a == 0 && e.b == 0) return 1.0;
    const Track* base = e.a != 0 ? index.track_of(e.frame, e.a) : index.track_of(e.frame + 1, e.b);
    if (!base) throw InternalError("confidence: edge " + edge_name(e) + " not on any track");

    const FrameSet& dets = cache.detections();
    std::vector<int> candidates;
    if (e.a == 0) {
        int next = dets.detections_in(e.frame + 1);
        for (int m = 0; m <= next; ++m) candidates.push_back(m);
    } else {
        candidates.push_back(0);
        const Vec2& from = dets.location(e.frame, e.a);
        const std::vector<Vec2>& next = dets.frames[e.frame];
        for (std::size_t c : cache.network().reachable_candidates(from, next, tau)) {
            candidates.push_back(static_cast<int>(c) + 1);
        }
        if (!std::count(candidates.begin(), candidates.end(), e.b)) candidates.push_back(e.b);
    }

    int span = we - ws + 1;
    double z = 0.0, wb = 0.0;
    Track t;
    t.start_frame = ws;
    t.nodes.resize(span);
    for (int f = ws; f <= e.frame; ++f) t.nodes[f - ws] = base->node_at_frame(f);
    for (int m : candidates) {
        t.nodes[e.frame + 1 - ws] = m;
        int cur = m;
        for (int f = e.frame + 2; f <= we; ++f) {
            cur = index.successor(f - 1, cur);
            t.nodes[f - ws] = cur;
        }
        if (t.real_count() == 0) continue;
        double w = std::exp(-track_cost(cache, t, params, span));
        z += w;
        if (m == e.b) wb = w;
    }
    if (z <= 0.0) throw InternalError("confidence: empty candidate universe for " + edge_name(e));
    return wb / z;
}

}  // namespace

ConfidenceMap estimate_confidence_marginal(const Subgraph& sub, const ProjectionCache& cache,
                                           const CostParams& params,
                                           const MarginalEstimateOptions& opts) {
    ConfidenceMap out;
    TrackIndex index(sub);
    std::vector<Subgraph::Edge> edges = sub.edges();
    if (edges.empty()) return out;

    const FrameSet& dets = cache.detections();
    AdjacencyRule rule = road_reachability_rule(cache.network(), dets, opts.tau);
    int n = sub.end_frame;
    int m = std::max(2, opts.window);
    std::size_t next_edge = 0;

    for (int ws = sub.start_frame; ws <= n && next_edge < edges.size(); ws += m) {
        int we = std::min(ws + m - 1, n);
        // Interior edges of this window; sources at frame `we` cross into the
        // next window and use the two-frame restricted marginal.
        std::vector<Subgraph::Edge> interior, boundary;
        while (next_edge < edges.size() && edges[next_edge].frame < we) {
            interior.push_back(edges[next_edge++]);
        }
        while (next_edge < edges.size() && edges[next_edge].frame == we) {
            boundary.push_back(edges[next_edge++]);
        }

        if (!interior.empty()) {
            bool full_ok = we > ws;
            std::vector<Track> tracks;
            if (full_ok) {
                try {
                    TrellisGraph g = build_trellis(dets, ws, we, rule);
                    tracks = enumerate_tracks(g, opts.max_consecutive_dummies, opts.enum_cap);
                    std::vector<double> costs;
                    costs.reserve(tracks.size());
                    for (const Track& t : tracks) {
                        costs.push_back(track_cost(cache, t, params, g.frame_span()));
                    }
                    MarginalConfidence mc(g, tracks, costs);
                    for (const Subgraph::Edge& e : interior) {
                        if (mc.has_source(e.frame, e.a)) {
                            out[e] = mc.edge_probability(e.frame, e.a, e.b);
                        } else {
                            out[e] = restricted_probability(e, ws, we, index, cache, params,
                                                            opts.tau);
                        }
                    }
                } catch (const CapacityError&) {
                    full_ok = false;
                }
            }
            if (!full_ok) {
                for (const Subgraph::Edge& e : interior) {
                    out[e] = restricted_probability(e, ws, we, index, cache, params, opts.tau);
                }
            }
        }
        for (const Subgraph::Edge& e : boundary) {
            out[e] = restricted_probability(e, e.frame, e.frame + 1, index, cache, params,
                                            opts.tau);
        }
    }
    return out;
}

ConfidenceMap estimate_confidence_gmm(const Subgraph& sub, const ProjectionCache& cache,
                                      const CostParams& params, const GmmParams& gmm) {
    ConfidenceMap out;
    TrackIndex index(sub);
    std::vector<std::vector<std::optional<Vec2>>> velocities(sub.tracks.size());
    auto velocity_of = [&](int k) -> const std::vector<std::optional<Vec2>>& {
        if (velocities[k].empty()) {
            velocities[k] = track_velocities(sub.tracks[k], cache.detections(), params.dt);
        }
        return velocities[k];
    };

    for (const Subgraph::Edge& e : sub.edges()) {
        EdgeFeatures f;  // dummy-to-dummy edges keep the neutral defaults
        int anchor = e.a != 0 ? e.a : e.b;
        int anchor_frame = e.a != 0 ? e.frame : e.frame + 1;
        if (anchor != 0) {
            auto it = index.by_node.find({anchor_frame, anchor});
            if (it == index.by_node.end()) {
                throw InternalError("confidence: edge " + edge_name(e) + " not on any track");
            }
            const Track& t = sub.tracks[it->second];
            f = edge_features(cache, t, velocity_of(it->second), e.frame - t.start_frame,
                              params.half_window);
        }
        out[e] = confidence_gmm(gmm, Eigen::Vector4d(f.gamma_m, f.gamma_theta, f.r_d, f.r_theta));
    }
    return out;
}

std::vector<Eigen::Vector4d> association_features(const Subgraph& sub,
                                                  const ProjectionCache& cache,
                                                  const CostParams& params) {
    std::vector<Eigen::Vector4d> out;
    for (const Track& t : sub.tracks) {
        auto v = track_velocities(t, cache.detections(), params.dt);
        for (int f = 0; f + 1 < t.length(); ++f) {
            if (t.nodes[f] == 0 || t.nodes[f + 1] == 0) continue;
            EdgeFeatures ef = edge_features(cache, t, v, f, params.half_window);
            out.emplace_back(ef.gamma_m, ef.gamma_theta, ef.r_d, ef.r_theta);
        }
    }
    return out;
}

}  // namespace spaam
