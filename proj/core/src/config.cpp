#include "curvecast/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace curvecast {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "off" || value == "0" || value == "no") return false;
    throw std::invalid_argument("config: key '" + key + "' expects a boolean, got '" + value +
                                "'");
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + value +
                                    "'");
    }
}

long long parse_int(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' expects an integer, got '" +
                                    value + "'");
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& part : split_list(text)) {
        const auto colon = part.find(':');
        if (colon != std::string::npos) {
            const int lo = static_cast<int>(parse_int(part.substr(0, colon), "list"));
            const int hi = static_cast<int>(parse_int(part.substr(colon + 1), "list"));
            if (hi < lo) throw std::invalid_argument("config: empty range '" + part + "'");
            for (int v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            out.push_back(static_cast<int>(parse_int(part, "list")));
        }
    }
    return out;
}

Forecaster parse_forecaster(const std::string& text) {
    if (text == "arima" || text == "uni") return Forecaster::arima;
    if (text == "var") return Forecaster::var;
    throw std::invalid_argument("config: unknown forecaster '" + text +
                                "' (expected arima or var)");
}

ContaminationMode parse_contamination_mode(const std::string& text) {
    if (text == "none") return ContaminationMode::none;
    if (text == "scores") return ContaminationMode::scores;
    if (text == "curves") return ContaminationMode::curves;
    throw std::invalid_argument("config: unknown contamination mode '" + text + "'");
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    RunConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " of '" + path + "' is not 'key = value'");
        }
        config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "input") {
        input = value;
    } else if (key == "output_dir") {
        output_dir = value;
    } else if (key == "p") {
        p = static_cast<int>(parse_int(value, key));
    } else if (key == "support_start") {
        support_start = parse_double(value, key);
    } else if (key == "support_end") {
        support_end = parse_double(value, key);
    } else if (key == "sqrt_transform") {
        sqrt_transform = parse_bool(value, key);
    } else if (key == "delta") {
        delta = parse_double(value, key);
    } else if (key == "robust") {
        robust = parse_bool(value, key);
    } else if (key == "robust_lambda") {
        robust_lambda = parse_double(value, key);
    } else if (key == "forecaster") {
        forecaster = parse_forecaster(value);
    } else if (key == "method" || key == "methods") {
        methods = split_list(value);
    } else if (key == "m0") {
        m0_schedule = parse_int_list(value);
    } else if (key == "alpha") {
        alpha = parse_double(value, key);
    } else if (key == "B") {
        B = static_cast<int>(parse_int(value, key));
    } else if (key == "q") {
        q = static_cast<int>(parse_int(value, key));
    } else if (key == "intervals") {
        intervals = parse_bool(value, key);
    } else if (key == "min_train") {
        min_train = static_cast<int>(parse_int(value, key));
    } else if (key == "max_lag") {
        max_lag = static_cast<int>(parse_int(value, key));
    } else if (key == "reps") {
        reps = static_cast<int>(parse_int(value, key));
    } else if (key == "sim_n") {
        sim_n = static_cast<int>(parse_int(value, key));
    } else if (key == "levels") {
        levels = parse_int_list(value);
    } else if (key == "contamination_mode") {
        contamination_mode = parse_contamination_mode(value);
    } else if (key == "actual") {
        actual_path = value;
    } else if (key == "forecast") {
        forecast_path = value;
    } else if (key == "lower") {
        lower_path = value;
    } else if (key == "upper") {
        upper_path = value;
    } else if (key == "seed") {
        seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else if (key == "threads") {
        threads = static_cast<int>(parse_int(value, key));
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

FpcaOptions RunConfig::fpca_options() const {
    FpcaOptions options;
    options.delta = delta;
    options.robust = robust;
    options.robust_cfg.lambda = robust_lambda;
    return options;
}

ForecasterConfig RunConfig::forecaster_config() const {
    return ForecasterConfig{forecaster, 5};
}

void RunConfig::validate_common() const {
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw std::invalid_argument("config: delta must lie in (0,1]");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("config: alpha must lie in (0,1)");
    }
    if (q < 1) throw std::invalid_argument("config: q must be >= 1");
    if (B < 100) throw std::invalid_argument("config: B must be >= 100");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    if (!(robust_lambda > 0.0)) {
        throw std::invalid_argument("config: robust_lambda must be positive");
    }
}

std::string resolve_output_dir(const RunConfig& config) {
    if (!config.output_dir.empty()) return config.output_dir;
    if (const char* env = std::getenv("CURVECAST_OUTDIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return "curvecast_out";
}

}  // namespace curvecast
