#include "spaam/roadnet.hpp"

#include "spaam/errors.hpp"
#include "spaam/kernels.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

namespace spaam {

namespace {

constexpr double kProjectionTieEps = 1e-9;

void validate_road(const Road& r) {
    if (r.lanes < 1) {
        throw InputError("road " + std::to_string(r.id) + ": lanes must be >= 1, got " +
                         std::to_string(r.lanes));
    }
    if (r.points.size() < 2) {
        throw InputError("road " + std::to_string(r.id) + ": polyline needs >= 2 vertices");
    }
    for (std::size_t i = 1; i < r.points.size(); ++i) {
        if (r.points[i] == r.points[i - 1]) {
            throw InputError("road " + std::to_string(r.id) +
                             ": consecutive vertices identical at position " + std::to_string(i));
        }
    }
}

}  // namespace

RoadNetwork::RoadNetwork(std::vector<Road> roads, double max_projection_distance, double lut_grid)
    : roads_(std::move(roads)),
      max_projection_distance_(max_projection_distance),
      lut_grid_(lut_grid) {
    if (roads_.empty()) throw InputError("road network is empty");
    for (const Road& r : roads_) validate_road(r);

    std::stable_sort(roads_.begin(), roads_.end(),
                     [](const Road& a, const Road& b) { return a.id < b.id; });

    // Expand: one-way roads keep their vertex order; two-way roads get an
    // additional reversed polyline. Forward copies sort before reversed ones
    // so projection tie-breaking is (road id, forward first, segment index).
    for (const Road& r : roads_) {
        DirectedPolyline fwd{r.id, r.lanes, false, r.points, 0};
        lines_.push_back(std::move(fwd));
        if (!r.oneway) {
            DirectedPolyline rev{r.id, r.lanes, true, r.points, 0};
            std::reverse(rev.points.begin(), rev.points.end());
            lines_.push_back(std::move(rev));
        }
    }

    std::map<std::pair<double, double>, int> vertex_ids;
    auto vertex_of = [&](const Vec2& p) {
        auto [it, inserted] = vertex_ids.try_emplace({p.x, p.y}, static_cast<int>(vertex_pos_.size()));
        if (inserted) {
            vertex_pos_.push_back(p);
            out_edges_.emplace_back();
        }
        return it->second;
    };

    for (std::size_t li = 0; li < lines_.size(); ++li) {
        DirectedPolyline& line = lines_[li];
        line.first_segment = static_cast<int>(seg_ax_.size());
        double len_sum = 0.0;
        for (std::size_t s = 0; s + 1 < line.points.size(); ++s) {
            const Vec2& a = line.points[s];
            const Vec2& b = line.points[s + 1];
            double len = distance(a, b);
            len_sum += len;
            seg_ax_.push_back(a.x);
            seg_ay_.push_back(a.y);
            seg_bx_.push_back(b.x);
            seg_by_.push_back(b.y);
            seg_line_.push_back(static_cast<int>(li));
            seg_local_.push_back(static_cast<int>(s));
            seg_len_.push_back(len);
            int va = vertex_of(a);
            int vb = vertex_of(b);
            seg_from_vertex_.push_back(va);
            seg_to_vertex_.push_back(vb);
            out_edges_[va].emplace_back(vb, len);
        }
        line_length_.push_back(len_sum);
        if (!line.reversed) total_length_ += len_sum;
    }
}

CenterlineProjection RoadNetwork::project_to_centerline(const Vec2& p) const {
    kernels::SegmentHit hit = kernels::nearest_segment(p.x, p.y, seg_ax_.data(), seg_ay_.data(),
                                                       seg_bx_.data(), seg_by_.data(),
                                                       seg_ax_.size());
    const DirectedPolyline& line = lines_[seg_line_[hit.index]];
    Vec2 a{seg_ax_[hit.index], seg_ay_[hit.index]};
    Vec2 b{seg_bx_[hit.index], seg_by_[hit.index]};
    CenterlineProjection proj;
    proj.point = a + (b - a) * hit.t;
    proj.distance = std::sqrt(hit.dist2);
    proj.road_dir = (b - a).normalized();
    proj.lanes = line.lanes;
    proj.road_id = line.road_id;
    proj.segment = hit.index;
    proj.t = hit.t;
    return proj;
}

std::vector<RoadNetwork::Projection> RoadNetwork::achieving_projections(const Vec2& p) const {
    kernels::SegmentHit hit = kernels::nearest_segment(p.x, p.y, seg_ax_.data(), seg_ay_.data(),
                                                       seg_bx_.data(), seg_by_.data(),
                                                       seg_ax_.size());
    double best = std::sqrt(hit.dist2);
    if (best > max_projection_distance_) return {};

    // All segments achieving the minimum distance (two-way roads project onto
    // both directed copies; junction points onto several roads).
    double limit = best + kProjectionTieEps;
    double limit2 = limit * limit;
    std::vector<Projection> out;
    for (std::size_t i = 0; i < seg_ax_.size(); ++i) {
        double dx = seg_bx_[i] - seg_ax_[i];
        double dy = seg_by_[i] - seg_ay_[i];
        double rx = p.x - seg_ax_[i];
        double ry = p.y - seg_ay_[i];
        double num = rx * dx + ry * dy;
        double den = dx * dx + dy * dy;
        double t = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.0;
        double ex = rx - t * dx;
        double ey = ry - t * dy;
        double d2 = ex * ex + ey * ey;
        if (d2 <= limit2) out.push_back({static_cast<int>(i), t, std::sqrt(d2)});
    }
    return out;
}

std::vector<double> RoadNetwork::shortest_from(const std::vector<Projection>& sources) const {
    std::vector<double> dist(vertex_pos_.size(), kUnreachable);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (const Projection& s : sources) {
        int v = seg_to_vertex_[s.segment];
        double d = (1.0 - s.t) * seg_len_[s.segment];
        if (d < dist[v]) {
            dist[v] = d;
            pq.push({d, v});
        }
    }
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        for (auto [w, len] : out_edges_[v]) {
            double nd = d + len;
            if (nd < dist[w]) {
                dist[w] = nd;
                pq.push({nd, w});
            }
        }
    }
    return dist;
}

double RoadNetwork::path_between(const std::vector<Projection>& sa,
                                 const std::vector<Projection>& sb,
                                 const std::vector<double>& dist) const {
    double best = kUnreachable;
    for (const Projection& t : sb) {
        double via = dist[seg_from_vertex_[t.segment]];
        if (via < kUnreachable) best = std::min(best, via + t.t * seg_len_[t.segment]);
    }
    // Forward travel within a single segment never touches a graph vertex.
    for (const Projection& s : sa) {
        for (const Projection& t : sb) {
            if (s.segment == t.segment && s.t <= t.t) {
                best = std::min(best, (t.t - s.t) * seg_len_[s.segment]);
            }
        }
    }
    return best;
}

double RoadNetwork::travel_distance_uncached(const Vec2& a, const Vec2& b) const {
    auto sa = achieving_projections(a);
    if (sa.empty()) return kUnreachable;
    auto sb = achieving_projections(b);
    if (sb.empty()) return kUnreachable;
    std::vector<double> dist = shortest_from(sa);
    double path = path_between(sa, sb, dist);
    if (path == kUnreachable) return kUnreachable;
    return sa.front().dist + path + sb.front().dist;
}

RoadNetwork::LutKey RoadNetwork::lut_key(const Vec2& a, const Vec2& b) const {
    auto q = [this](double v) { return static_cast<int64_t>(std::floor(v / lut_grid_)); };
    return {q(a.x), q(a.y), q(b.x), q(b.y)};
}

double RoadNetwork::travel_distance(const Vec2& a, const Vec2& b) const {
    LutKey key = lut_key(a, b);
    {
        std::shared_lock lock(lut_mutex_);
        auto it = lut_.find(key);
        if (it != lut_.end()) return it->second;
    }
    double d = travel_distance_uncached(a, b);
    {
        std::unique_lock lock(lut_mutex_);
        lut_.try_emplace(key, d);
    }
    return d;
}

std::vector<double> RoadNetwork::travel_distances(const Vec2& from,
                                                  const std::vector<Vec2>& targets) const {
    std::vector<double> out(targets.size(), kUnreachable);
    std::vector<std::size_t> missing;
    {
        std::shared_lock lock(lut_mutex_);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            auto it = lut_.find(lut_key(from, targets[i]));
            if (it != lut_.end()) {
                out[i] = it->second;
            } else {
                missing.push_back(i);
            }
        }
    }
    if (missing.empty()) return out;

    auto sa = achieving_projections(from);
    std::vector<double> dist;
    if (!sa.empty()) dist = shortest_from(sa);
    for (std::size_t i : missing) {
        double d = kUnreachable;
        if (!sa.empty()) {
            auto sb = achieving_projections(targets[i]);
            if (!sb.empty()) {
                double path = path_between(sa, sb, dist);
                if (path < kUnreachable) d = sa.front().dist + path + sb.front().dist;
            }
        }
        out[i] = d;
    }
    {
        std::unique_lock lock(lut_mutex_);
        for (std::size_t i : missing) lut_.try_emplace(lut_key(from, targets[i]), out[i]);
    }
    return out;
}

std::vector<std::size_t> RoadNetwork::reachable_candidates(const Vec2& from,
                                                           const std::vector<Vec2>& candidates,
                                                           double tau) const {
    if (tau < 0.0) throw InputError("reachable_candidates: tau must be > 0");
    std::vector<double> d = travel_distances(from, candidates);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (d[i] <= tau) out.push_back(i);
    }
    return out;
}

std::size_t RoadNetwork::lut_size() const {
    std::shared_lock lock(lut_mutex_);
    return lut_.size();
}

Vec2 RoadNetwork::point_at(int line, double arc, Vec2* dir_out) const {
    const DirectedPolyline& pl = lines_[line];
    double remaining = std::clamp(arc, 0.0, line_length_[line]);
    for (std::size_t s = 0; s + 1 < pl.points.size(); ++s) {
        double len = distance(pl.points[s], pl.points[s + 1]);
        if (remaining <= len || s + 2 == pl.points.size()) {
            double t = len > 0.0 ? std::min(remaining / len, 1.0) : 0.0;
            Vec2 dir = (pl.points[s + 1] - pl.points[s]).normalized();
            if (dir_out) *dir_out = dir;
            return pl.points[s] + dir * (t * len);
        }
        remaining -= len;
    }
    if (dir_out) *dir_out = Vec2{0, 0};
    return pl.points.back();
}

RoadNetwork parse_road_network(const std::string& json_text, const std::string& origin,
                               double max_projection_distance, double lut_grid) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(origin + ": JSON parse error: " + e.what());
    }
    if (!j.contains("roads") || !j["roads"].is_array()) {
        throw InputError(origin + ": missing \"roads\" array");
    }
    std::vector<Road> roads;
    for (std::size_t idx = 0; idx < j["roads"].size(); ++idx) {
        const auto& jr = j["roads"][idx];
        Road r;
        try {
            r.id = jr.at("id").get<int>();
            r.lanes = jr.at("lanes").get<int>();
            r.oneway = jr.at("oneway").get<bool>();
            for (const auto& pt : jr.at("points")) {
                r.points.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
            }
        } catch (const nlohmann::json::exception& e) {
            throw InputError(origin + ": roads[" + std::to_string(idx) + "]: " + e.what());
        }
        roads.push_back(std::move(r));
    }
    return RoadNetwork(std::move(roads), max_projection_distance, lut_grid);
}

RoadNetwork load_road_network(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw InputError("cannot open road network file: " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_road_network(ss.str(), file.string());
}

std::string road_network_to_json(const std::vector<Road>& roads) {
    nlohmann::json j;
    j["roads"] = nlohmann::json::array();
    for (const Road& r : roads) {
        nlohmann::json jr;
        jr["id"] = r.id;
        jr["lanes"] = r.lanes;
        jr["oneway"] = r.oneway;
        nlohmann::json pts = nlohmann::json::array();
        for (const Vec2& p : r.points) pts.push_back({p.x, p.y});
        jr["points"] = std::move(pts);
        j["roads"].push_back(std::move(jr));
    }
    return j.dump(2);
}

}  // namespace spaam
