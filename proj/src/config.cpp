#include "spaam/config.hpp"

#include "spaam/errors.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace spaam {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T>
T parse_number(const std::string& v, const std::string& key) {
    std::istringstream is(v);
    T out;
    is >> out;
    if (is.fail() || !is.eof()) throw InputError("config: bad value for " + key + ": '" + v + "'");
    return out;
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        auto str = [&t](const std::string& key, std::string RunConfig::* member) {
            t[key] = {[member](RunConfig& c, const std::string& v) { c.*member = v; },
                      [member](const RunConfig& c) { return c.*member; }};
        };
        auto num = [&t](const std::string& key, auto member) {
            using T = std::remove_reference_t<decltype(std::declval<RunConfig&>().*member)>;
            t[key] = {[member, key](RunConfig& c, const std::string& v) {
                          c.*member = parse_number<T>(v, key);
                      },
                      [member](const RunConfig& c) {
                          if constexpr (std::is_floating_point_v<T>) {
                              return fmt_double(c.*member);
                          } else {
                              return std::to_string(c.*member);
                          }
                      }};
        };
        auto cost_num = [&t](const std::string& key, auto member) {
            using T = std::remove_reference_t<decltype(std::declval<CostParams&>().*member)>;
            t[key] = {[member, key](RunConfig& c, const std::string& v) {
                          c.cost.*member = parse_number<T>(v, key);
                      },
                      [member](const RunConfig& c) {
                          if constexpr (std::is_floating_point_v<T>) {
                              return fmt_double(c.cost.*member);
                          } else {
                              return std::to_string(c.cost.*member);
                          }
                      }};
        };
        str("algorithm", &RunConfig::algorithm);
        str("detections", &RunConfig::detections);
        str("roadnet", &RunConfig::roadnet);
        str("gt", &RunConfig::gt);
        str("out_dir", &RunConfig::out_dir);
        str("gmm_params", &RunConfig::gmm_params);
        str("train_detections", &RunConfig::train_detections);
        str("train_gt", &RunConfig::train_gt);
        num("seed", &RunConfig::seed);
        num("threads", &RunConfig::threads);
        num("tau", &RunConfig::tau);
        num("max_projection_distance", &RunConfig::max_projection_distance);
        num("initial_window", &RunConfig::initial_window);
        num("branching", &RunConfig::branching);
        num("max_iters", &RunConfig::max_iters);
        num("window", &RunConfig::window);
        num("max_consecutive_dummies", &RunConfig::max_consecutive_dummies);
        num("hypothesis_cap", &RunConfig::hypothesis_cap);
        num("confidence_enum_cap", &RunConfig::confidence_enum_cap);
        num("solver_timeout", &RunConfig::solver_timeout);
        num("ot_miss_cost", &RunConfig::ot_miss_cost);
        num("ot_max_coast", &RunConfig::ot_max_coast);
        num("icm_max_sweeps", &RunConfig::icm_max_sweeps);
        num("match_radius", &RunConfig::match_radius);
        cost_num("sigma_m", &CostParams::sigma_m);
        cost_num("sigma_d", &CostParams::sigma_d);
        cost_num("sigma_theta", &CostParams::sigma_theta);
        cost_num("sigma_g", &CostParams::sigma_g);
        cost_num("half_window", &CostParams::half_window);
        cost_num("dt", &CostParams::dt);
        return t;
    }();
    return table;
}

}  // namespace

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": expected key = value");
        }
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        auto it = fields().find(key);
        if (it == fields().end()) {
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": unknown key '" +
                             key + "'");
        }
        it->second.set(cfg, value);
    }
}

std::string dump_config(const RunConfig& cfg) {
    std::ostringstream os;
    for (const auto& [key, field] : fields()) {
        std::string v = field.get(cfg);
        bool quote = v.empty() || v.find(' ') != std::string::npos;
        os << key << " = " << (quote ? "\"" + v + "\"" : v) << "\n";
    }
    return os.str();
}

}  // namespace spaam
