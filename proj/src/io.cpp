#include "spaam/io.hpp"

#include "spaam/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace spaam::io {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(field);
    return out;
}

bool looks_like_header(const std::string& line) {
    return !line.empty() && !std::isdigit(static_cast<unsigned char>(line[0])) && line[0] != '-';
}

double parse_double(const std::string& s, const std::string& origin, int line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw InputError(origin + ":" + std::to_string(line_no) + ": bad number '" + s + "'");
    }
}

int parse_int(const std::string& s, const std::string& origin, int line_no) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw InputError(origin + ":" + std::to_string(line_no) + ": bad integer '" + s + "'");
    }
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write file: " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

FrameSet read_detections_csv(const std::filesystem::path& path) {
    FrameSet fs;
    int line_no = 0;
    for (const std::string& line : read_lines(path)) {
        ++line_no;
        if (line.empty() || (line_no == 1 && looks_like_header(line))) continue;
        auto f = split_csv_line(line);
        if (f.size() != 4) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": expected frame,index,x,y");
        }
        int frame = parse_int(f[0], path.string(), line_no);
        int index = parse_int(f[1], path.string(), line_no);
        if (frame < 1 || index < 1) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": frame and index are 1-based");
        }
        if (frame > fs.frame_count()) fs.frames.resize(frame);
        auto& row = fs.frames[frame - 1];
        if (index != static_cast<int>(row.size()) + 1) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": detection indices must be consecutive within a frame");
        }
        row.push_back({parse_double(f[2], path.string(), line_no),
                       parse_double(f[3], path.string(), line_no)});
    }
    return fs;
}

std::string detections_to_csv(const FrameSet& detections) {
    std::ostringstream os;
    os << "frame,index,x,y\n";
    for (int i = 1; i <= detections.frame_count(); ++i) {
        for (int j = 1; j <= detections.detections_in(i); ++j) {
            const Vec2& p = detections.location(i, j);
            os << i << ',' << j << ',' << fmt_double(p.x) << ',' << fmt_double(p.y) << '\n';
        }
    }
    return os.str();
}

LabeledFrames read_ground_truth_csv(const std::filesystem::path& path) {
    LabeledFrames out;
    int line_no = 0;
    for (const std::string& line : read_lines(path)) {
        ++line_no;
        if (line.empty() || (line_no == 1 && looks_like_header(line))) continue;
        auto f = split_csv_line(line);
        if (f.size() != 5) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": expected frame,index,x,y,track_id");
        }
        int frame = parse_int(f[0], path.string(), line_no);
        if (frame < 1) {
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": bad frame");
        }
        if (frame > static_cast<int>(out.size())) out.resize(frame);
        out[frame - 1].push_back({parse_int(f[4], path.string(), line_no),
                                  {parse_double(f[2], path.string(), line_no),
                                   parse_double(f[3], path.string(), line_no)}});
    }
    return out;
}

std::string ground_truth_to_csv(const LabeledFrames& gt) {
    std::ostringstream os;
    os << "frame,index,x,y,track_id\n";
    for (std::size_t fi = 0; fi < gt.size(); ++fi) {
        for (std::size_t j = 0; j < gt[fi].size(); ++j) {
            const LabeledPoint& p = gt[fi][j];
            os << fi + 1 << ',' << j + 1 << ',' << fmt_double(p.pos.x) << ','
               << fmt_double(p.pos.y) << ',' << p.id << '\n';
        }
    }
    return os.str();
}

std::string tracks_to_csv(const Subgraph& sub, const FrameSet& detections) {
    std::ostringstream os;
    os << "track_id,frame,x,y,detection_index\n";
    int id = 0;
    for (const Track& t : sub.tracks) {
        int first = -1, last = -1;
        for (int f = 0; f < t.length(); ++f) {
            if (t.nodes[f] != 0) {
                if (first < 0) first = f;
                last = f;
            }
        }
        if (first < 0) continue;
        ++id;
        for (int f = first; f <= last; ++f) {
            int frame = t.start_frame + f;
            int j = t.nodes[f];
            if (j == 0) {
                os << id << ',' << frame << ",,,0\n";
            } else {
                const Vec2& p = detections.location(frame, j);
                os << id << ',' << frame << ',' << fmt_double(p.x) << ',' << fmt_double(p.y)
                   << ',' << j << '\n';
            }
        }
    }
    return os.str();
}

LabeledFrames read_tracks_csv(const std::filesystem::path& path) {
    LabeledFrames out;
    int line_no = 0;
    for (const std::string& line : read_lines(path)) {
        ++line_no;
        if (line.empty() || (line_no == 1 && looks_like_header(line))) continue;
        auto f = split_csv_line(line);
        if (f.size() != 5) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": expected track_id,frame,x,y,detection_index");
        }
        if (f[2].empty() || f[3].empty()) continue;  // dummy row
        int frame = parse_int(f[1], path.string(), line_no);
        if (frame < 1) {
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": bad frame");
        }
        if (frame > static_cast<int>(out.size())) out.resize(frame);
        out[frame - 1].push_back({parse_int(f[0], path.string(), line_no),
                                  {parse_double(f[2], path.string(), line_no),
                                   parse_double(f[3], path.string(), line_no)}});
    }
    return out;
}

std::string trace_to_json(const IterationTrace& trace) {
    nlohmann::json j;
    j["iterations"] = nlohmann::json::array();
    for (const IterationStats& it : trace.iterations) {
        nlohmann::json ji;
        ji["iteration"] = it.iteration;
        ji["window_size"] = it.window_size;
        ji["total_cost"] = it.total_cost;
        ji["edges_retained"] = it.edges_retained;
        ji["edges_dissolved"] = it.edges_dissolved;
        ji["wall_seconds"] = it.wall_seconds;
        ji["windows_per_level"] = it.windows_per_level;
        j["iterations"].push_back(std::move(ji));
    }
    return j.dump(2);
}

IterationTrace read_trace_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open trace file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    IterationTrace trace;
    try {
        for (const auto& ji : j.at("iterations")) {
            IterationStats it;
            it.iteration = ji.at("iteration").get<int>();
            it.window_size = ji.at("window_size").get<int>();
            it.total_cost = ji.at("total_cost").get<double>();
            it.edges_retained = ji.value("edges_retained", 0);
            it.edges_dissolved = ji.value("edges_dissolved", 0);
            it.wall_seconds = ji.at("wall_seconds").get<double>();
            if (ji.contains("windows_per_level")) {
                it.windows_per_level = ji["windows_per_level"].get<std::vector<int>>();
            }
            trace.iterations.push_back(std::move(it));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return trace;
}

std::string gmm_to_json(const GmmParams& p) {
    nlohmann::json j;
    j["gamma"] = p.gamma;
    auto vec = [](const Eigen::Vector4d& v) {
        return std::vector<double>{v(0), v(1), v(2), v(3)};
    };
    auto mat = [](const Eigen::Matrix4d& m) {
        std::vector<std::vector<double>> rows;
        for (int r = 0; r < 4; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2), m(r, 3)});
        return rows;
    };
    j["mu0"] = vec(p.mu0);
    j["mu1"] = vec(p.mu1);
    j["cov0"] = mat(p.cov0);
    j["cov1"] = mat(p.cov1);
    return j.dump(2);
}

GmmParams read_gmm_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open GMM parameter file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    GmmParams p;
    try {
        p.gamma = j.at("gamma").get<double>();
        for (int i = 0; i < 4; ++i) {
            p.mu0(i) = j.at("mu0").at(i).get<double>();
            p.mu1(i) = j.at("mu1").at(i).get<double>();
            for (int c = 0; c < 4; ++c) {
                p.cov0(i, c) = j.at("cov0").at(i).at(c).get<double>();
                p.cov1(i, c) = j.at("cov1").at(i).at(c).get<double>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    if (p.gamma <= 0.0 || p.gamma >= 1.0) {
        throw InputError(path.string() + ": gamma must be in (0,1)");
    }
    return p;
}

std::string mot_report_to_json(const MotReport& r) {
    nlohmann::json j;
    j["mostly_tracked"] = r.mostly_tracked;
    j["mostly_lost"] = r.mostly_lost;
    j["partially_tracked"] = r.partially_tracked;
    j["id_switches"] = r.id_switches;
    j["fragments"] = r.fragments;
    j["false_negatives"] = r.false_negatives;
    j["false_positives"] = r.false_positives;
    j["gt_tracks"] = r.gt_tracks;
    j["gt_detections"] = r.gt_detections;
    j["mota"] = r.mota;
    j["tracks"] = nlohmann::json::array();
    for (const auto& d : r.details) {
        nlohmann::json jd;
        jd["gt_id"] = d.gt_id;
        jd["gt_length"] = d.gt_length;
        jd["matched"] = d.matched;
        jd["coverage"] = d.coverage;
        jd["switches"] = d.switches;
        jd["fragments"] = d.fragments;
        jd["category"] = std::string(1, d.category);
        j["tracks"].push_back(std::move(jd));
    }
    return j.dump(2);
}

}  // namespace spaam::io
