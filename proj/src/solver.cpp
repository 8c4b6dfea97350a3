#include "spaam/solver.hpp"

#include "spaam/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace spaam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundSlack = 1e-12;

struct BitCover {
    std::vector<uint64_t> words;

    explicit BitCover(int bits) : words((bits + 63) / 64, 0) {}
    void set(int i) { words[i >> 6] |= uint64_t{1} << (i & 63); }
    bool test(int i) const { return (words[i >> 6] >> (i & 63)) & 1; }
    bool intersects(const BitCover& o) const {
        for (std::size_t w = 0; w < words.size(); ++w) {
            if (words[w] & o.words[w]) return true;
        }
        return false;
    }
    void merge(const BitCover& o) {
        for (std::size_t w = 0; w < words.size(); ++w) words[w] |= o.words[w];
    }
    void subtract(const BitCover& o) {
        for (std::size_t w = 0; w < words.size(); ++w) words[w] &= ~o.words[w];
    }
};

struct Instance {
    const WindowProblem* p;
    int real_nodes = 0;
    std::vector<std::vector<int>> cover;  // hypothesis -> sorted real node ids
    std::vector<BitCover> bits;

    explicit Instance(const WindowProblem& prob) : p(&prob) {
        const TrellisGraph& g = *prob.graph;
        real_nodes = g.total_real_nodes();
        cover.reserve(prob.hypotheses.size());
        bits.reserve(prob.hypotheses.size());
        for (const Track& t : prob.hypotheses) {
            std::vector<int> nodes;
            BitCover b(real_nodes);
            for (int f = 0; f < t.length(); ++f) {
                if (t.nodes[f] == 0) continue;
                int id = g.real_node_id(t.start_frame + f, t.nodes[f]);
                nodes.push_back(id);
                b.set(id);
            }
            cover.push_back(std::move(nodes));
            bits.push_back(std::move(b));
        }
    }
};

double canonical_total(const std::vector<double>& costs, const std::vector<int>& sorted_ids) {
    double sum = 0.0;
    for (int id : sorted_ids) sum += costs[id];
    return sum;
}

// Strictly better, or equal cost with lexicographically smaller id set.
bool improves(double cost, const std::vector<int>& ids, double best_cost,
              const std::vector<int>& best_ids) {
    if (cost < best_cost) return true;
    if (cost == best_cost) {
        return std::lexicographical_compare(ids.begin(), ids.end(), best_ids.begin(),
                                            best_ids.end());
    }
    return false;
}

Solution make_solution(const WindowProblem& p, std::vector<int> ids, double cost) {
    Solution s;
    s.selected = std::move(ids);
    s.total_cost = cost;
    s.subgraph.start_frame = p.graph->start_frame();
    s.subgraph.end_frame = p.graph->end_frame();
    for (int id : s.selected) s.subgraph.tracks.push_back(p.hypotheses[id]);
    return s;
}

struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Exact branch-and-bound over one independent component, with exact-cover
// bookkeeping: block counters per hypothesis, per-node available counts, and
// a dynamic admissible bound of sum over uncovered nodes of the cheapest
// available per-node cost share.
class ComponentSolver {
public:
    ComponentSolver(const Instance& inst, const std::vector<double>& costs,
                    const std::vector<int>& nodes, const std::vector<int>& hyps,
                    std::chrono::steady_clock::time_point deadline, double timeout_seconds)
        : inst_(inst),
          costs_(costs),
          nodes_(nodes),
          deadline_(deadline),
          timeout_seconds_(timeout_seconds) {
        int local = 0;
        local_id_.assign(inst_.real_nodes, -1);
        for (int n : nodes_) local_id_[n] = local++;
        by_node_.resize(nodes_.size());
        ratio_.resize(hyps.size());
        local_hyp_.assign(inst_.cover.size(), -1);
        for (std::size_t i = 0; i < hyps.size(); ++i) {
            int h = hyps[i];
            local_hyp_[h] = static_cast<int>(i);
            ratio_[i] = costs_[h] / static_cast<double>(inst_.cover[h].size());
            for (int n : inst_.cover[h]) by_node_[local_id_[n]].push_back(h);
        }
        for (std::size_t ln = 0; ln < by_node_.size(); ++ln) {
            if (by_node_[ln].empty()) {
                throw InternalError("solve_window: real node id " + std::to_string(nodes_[ln]) +
                                    " has no covering hypothesis");
            }
            std::sort(by_node_[ln].begin(), by_node_[ln].end(), [this](int a, int b) {
                if (costs_[a] != costs_[b]) return costs_[a] < costs_[b];
                return a < b;
            });
        }
        blocked_.assign(hyps.size(), 0);
        covered_node_.assign(nodes_.size(), 0);
        avail_.resize(nodes_.size());
        min_ratio_.assign(nodes_.size(), 0.0);
        for (std::size_t ln = 0; ln < by_node_.size(); ++ln) {
            avail_[ln] = static_cast<int>(by_node_[ln].size());
            min_ratio_[ln] = refresh_min(static_cast<int>(ln));
        }
    }

    // Returns sorted hypothesis ids of the optimal selection.
    std::pair<std::vector<int>, double> solve() {
        // Initial incumbent: single-node hypotheses never conflict.
        {
            std::vector<int> singles;
            for (std::size_t ln = 0; ln < by_node_.size(); ++ln) {
                int pick = -1;
                for (int h : by_node_[ln]) {
                    if (inst_.cover[h].size() == 1) {
                        pick = h;
                        break;
                    }
                }
                if (pick < 0) {
                    singles.clear();
                    break;
                }
                singles.push_back(pick);
            }
            if (!singles.empty() || nodes_.empty()) {
                std::sort(singles.begin(), singles.end());
                best_ids_ = std::move(singles);
                best_cost_ = canonical_total(costs_, best_ids_);
            }
        }
        dfs(0.0);
        if (best_cost_ == kInf) {
            throw InternalError("solve_window: no feasible selection (exactly-once coverage)");
        }
        return {best_ids_, best_cost_};
    }

private:
    double refresh_min(int ln) {
        double m = 0.0;
        for (int h : by_node_[ln]) {
            if (blocked_[local_hyp_[h]] == 0) m = std::min(m, ratio_[local_hyp_[h]]);
        }
        return m;
    }

    // Block every available hypothesis conflicting with h (sharing a node);
    // returns the list of newly blocked hypotheses for rollback.
    void select(int h, std::vector<int>& newly_blocked) {
        for (int n : inst_.cover[h]) covered_node_[local_id_[n]] = 1;
        for (int n : inst_.cover[h]) {
            for (int h2 : by_node_[local_id_[n]]) {
                int lh = local_hyp_[h2];
                if (blocked_[lh]++ == 0) {
                    newly_blocked.push_back(h2);
                    for (int m : inst_.cover[h2]) {
                        int lm = local_id_[m];
                        --avail_[lm];
                        if (!covered_node_[lm] && ratio_[lh] == min_ratio_[lm]) {
                            min_dirty_.push_back(lm);  // cheapest option gone
                        }
                    }
                }
            }
        }
        for (int lm : min_dirty_) {
            if (!covered_node_[lm]) min_ratio_[lm] = refresh_min(lm);
        }
        min_dirty_.clear();
    }

    void unselect(int h, const std::vector<int>& newly_blocked) {
        for (int n : inst_.cover[h]) covered_node_[local_id_[n]] = 0;
        for (int n : inst_.cover[h]) {
            for (int h2 : by_node_[local_id_[n]]) --blocked_[local_hyp_[h2]];
        }
        for (int h2 : newly_blocked) {
            for (int m : inst_.cover[h2]) {
                int lm = local_id_[m];
                ++avail_[lm];
                min_ratio_[lm] = std::min(min_ratio_[lm], ratio_[local_hyp_[h2]]);
            }
        }
    }

    void dfs(double current) {
        if ((++ticks_ & 0x3FF) == 0 && std::chrono::steady_clock::now() > deadline_) {
            std::string msg =
                "solve_window: timeout after " + std::to_string(timeout_seconds_) + " s";
            if (best_cost_ < kInf) {
                msg += "; incumbent " + std::to_string(best_cost_) + ", lower bound " +
                       std::to_string(current + bound_sum());
            }
            throw TimeoutError(msg);
        }

        // Branch node: uncovered with the fewest available hypotheses. The
        // bound sums the cheapest available cost share per uncovered node.
        int branch = -1;
        int branch_avail = std::numeric_limits<int>::max();
        double bound = 0.0;
        for (std::size_t ln = 0; ln < by_node_.size(); ++ln) {
            if (covered_node_[ln]) continue;
            if (avail_[ln] == 0) return;  // dead end
            bound += min_ratio_[ln];
            if (avail_[ln] < branch_avail) {
                branch_avail = avail_[ln];
                branch = static_cast<int>(ln);
            }
        }
        if (branch < 0) {
            std::vector<int> ids = chosen_;
            std::sort(ids.begin(), ids.end());
            double total = canonical_total(costs_, ids);
            if (improves(total, ids, best_cost_, best_ids_)) {
                best_cost_ = total;
                best_ids_ = std::move(ids);
            }
            return;
        }
        if (current + bound - kBoundSlack > best_cost_) return;

        std::vector<int> candidates;
        candidates.reserve(branch_avail);
        for (int h : by_node_[branch]) {
            if (blocked_[local_hyp_[h]] == 0) candidates.push_back(h);
        }
        std::vector<int> newly_blocked;
        for (int h : candidates) {
            newly_blocked.clear();
            chosen_.push_back(h);
            select(h, newly_blocked);
            dfs(current + costs_[h]);
            unselect(h, newly_blocked);
            chosen_.pop_back();
        }
    }

    double bound_sum() const {
        double b = 0.0;
        for (std::size_t ln = 0; ln < by_node_.size(); ++ln) {
            if (!covered_node_[ln]) b += min_ratio_[ln];
        }
        return b;
    }

    const Instance& inst_;
    const std::vector<double>& costs_;
    std::vector<int> nodes_;
    std::chrono::steady_clock::time_point deadline_;
    double timeout_seconds_;
    std::vector<int> local_id_;     // global node id -> component-local index
    std::vector<int> local_hyp_;    // global hypothesis id -> local index
    std::vector<std::vector<int>> by_node_;
    std::vector<double> ratio_;     // cost / cover size, local
    std::vector<int> blocked_;      // local: covered nodes shared with chosen
    std::vector<char> covered_node_;
    std::vector<int> avail_;
    std::vector<double> min_ratio_;
    std::vector<int> min_dirty_;
    std::vector<int> chosen_;
    std::vector<int> best_ids_;
    double best_cost_ = kInf;
    std::size_t ticks_ = 0;
};

}  // namespace

Solution solve_window(const WindowProblem& p, const SolveOptions& opts) {
    if (!p.graph) throw InternalError("solve_window: null graph");
    if (p.hypotheses.size() != p.costs.size()) {
        throw InternalError("solve_window: hypothesis/cost size mismatch");
    }
    if (p.graph->total_real_nodes() == 0) return make_solution(p, {}, 0.0);

    Instance inst(p);
    const int R = inst.real_nodes;

    // Dominance: hypotheses covering the same real nodes are interchangeable
    // in the partition constraints, so only the cheapest (smallest id on
    // ties) can appear in the lexicographically-first optimum.
    std::map<std::vector<int>, int> best_by_cover;
    for (std::size_t h = 0; h < inst.cover.size(); ++h) {
        auto [it, fresh] = best_by_cover.try_emplace(inst.cover[h], static_cast<int>(h));
        if (!fresh && p.costs[h] < p.costs[it->second]) it->second = static_cast<int>(h);
    }
    std::vector<int> active;
    active.reserve(best_by_cover.size());
    for (const auto& [cover, h] : best_by_cover) {
        if (!cover.empty()) active.push_back(h);
    }

    for (int n = 0; n < R; ++n) {
        bool covered = false;
        for (int h : active) {
            if (inst.bits[h].test(n)) {
                covered = true;
                break;
            }
        }
        if (!covered) {
            throw InternalError("solve_window: real node id " + std::to_string(n) +
                                " has no covering hypothesis");
        }
    }

    // Independent components: hypotheses only conflict within one.
    DisjointSets ds(R);
    for (int h : active) {
        for (std::size_t i = 1; i < inst.cover[h].size(); ++i) {
            ds.unite(inst.cover[h][0], inst.cover[h][i]);
        }
    }
    std::map<int, std::vector<int>> comp_nodes;
    for (int n = 0; n < R; ++n) comp_nodes[ds.find(n)].push_back(n);
    std::map<int, std::vector<int>> comp_hyps;
    for (int h : active) comp_hyps[ds.find(inst.cover[h][0])].push_back(h);

    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(opts.timeout_seconds));

    std::vector<int> selected;
    for (auto& [root, nodes] : comp_nodes) {
        ComponentSolver solver(inst, p.costs, nodes, comp_hyps[root], deadline,
                               opts.timeout_seconds);
        auto [ids, cost] = solver.solve();
        selected.insert(selected.end(), ids.begin(), ids.end());
    }
    std::sort(selected.begin(), selected.end());
    return make_solution(p, std::move(selected), canonical_total(p.costs, selected));
}

Solution brute_force_oracle(const WindowProblem& p) {
    if (!p.graph) throw InternalError("brute_force_oracle: null graph");
    if (p.hypotheses.size() > 10000) {
        throw CapacityError("brute_force_oracle: guard exceeded (" +
                            std::to_string(p.hypotheses.size()) + " hypotheses > 10000)");
    }
    if (p.graph->total_real_nodes() == 0) return make_solution(p, {}, 0.0);

    Instance inst(p);
    const int R = inst.real_nodes;
    std::vector<std::vector<int>> by_node(R);
    for (std::size_t h = 0; h < inst.cover.size(); ++h) {
        for (int n : inst.cover[h]) by_node[n].push_back(static_cast<int>(h));
    }
    for (int n = 0; n < R; ++n) {
        if (by_node[n].empty()) {
            throw InternalError("brute_force_oracle: real node id " + std::to_string(n) +
                                " has no covering hypothesis");
        }
    }

    double best_cost = kInf;
    std::vector<int> best_ids;
    BitCover covered(R);
    std::vector<int> chosen;

    // Exhaustive: always extend on the lowest uncovered node, trying covering
    // hypotheses in id order; visits every feasible selection exactly once.
    auto dfs = [&](auto&& self) -> void {
        int node = -1;
        for (int n = 0; n < R; ++n) {
            if (!covered.test(n)) {
                node = n;
                break;
            }
        }
        if (node < 0) {
            std::vector<int> ids = chosen;
            std::sort(ids.begin(), ids.end());
            double total = canonical_total(p.costs, ids);
            if (improves(total, ids, best_cost, best_ids)) {
                best_cost = total;
                best_ids = std::move(ids);
            }
            return;
        }
        for (int h : by_node[node]) {
            if (inst.bits[h].intersects(covered)) continue;
            covered.merge(inst.bits[h]);
            chosen.push_back(h);
            self(self);
            chosen.pop_back();
            covered.subtract(inst.bits[h]);
        }
    };
    dfs(dfs);

    if (best_cost == kInf) {
        throw InternalError("brute_force_oracle: no feasible selection");
    }
    return make_solution(p, std::move(best_ids), best_cost);
}

}  // namespace spaam
