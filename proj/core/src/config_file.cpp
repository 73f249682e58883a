#include "paprtr/config_file.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

namespace paprtr {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no" || value == "off") {
        return false;
    }
    throw ConfigError("config: key '" + key + "' expects a boolean, got '" + value + "'");
}

std::vector<std::string> split(const std::string& value, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(value);
    std::string part;
    while (std::getline(ss, part, sep)) {
        parts.push_back(trim(part));
    }
    return parts;
}

void apply_key(CampaignConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "n") {
        cfg.n_total = static_cast<Index>(parse_int(key, value));
    } else if (key == "n_prt") {
        cfg.n_prt = static_cast<Index>(parse_int(key, value));
    } else if (key == "trials") {
        cfg.n_trials = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "threads") {
        cfg.threads = static_cast<int>(parse_int(key, value));
    } else if (key == "constellation") {
        if (value == "qpsk") {
            cfg.constellation = Constellation::Qpsk;
        } else if (value == "16qam") {
            cfg.constellation = Constellation::Qam16;
        } else {
            throw ConfigError("config: constellation must be 'qpsk' or '16qam', got '" + value +
                              "'");
        }
    } else if (key == "methods") {
        cfg.methods.clear();
        for (const std::string& name : split(value, ',')) {
            if (name == "none") {
                cfg.methods.push_back(Method::None);
            } else if (name == "sota") {
                cfg.methods.push_back(Method::Sota);
            } else if (name == "sparse-fp") {
                cfg.methods.push_back(Method::SparseFp);
            } else {
                throw ConfigError("config: unknown method '" + name + "'");
            }
        }
    } else if (key == "rho_star_db") {
        cfg.rho_star_db = parse_real(key, value);
        cfg.sparse_fp.rho_star_db = cfg.rho_star_db;
    } else if (key == "alpha") {
        cfg.sparse_fp.alpha = parse_real(key, value);
    } else if (key == "epsilon") {
        cfg.sparse_fp.epsilon = parse_real(key, value);
    } else if (key == "omega") {
        cfg.sota.omega = parse_real(key, value);
        cfg.sparse_fp.sota.omega = cfg.sota.omega;
    } else if (key == "p_max") {
        cfg.sparse_fp.p_max = parse_real(key, value);
    } else if (key == "max_fp_iters") {
        cfg.sparse_fp.max_fp_iters = static_cast<int>(parse_int(key, value));
    } else if (key == "convergence_tol") {
        cfg.sparse_fp.convergence_tol = parse_real(key, value);
    } else if (key == "threshold_final_only") {
        cfg.sparse_fp.threshold_final_only = parse_bool(key, value);
    } else if (key == "allocation") {
        if (value == "random") {
            cfg.fixed_prt.clear();
        } else if (value.rfind("fixed:", 0) == 0) {
            cfg.fixed_prt.clear();
            for (const std::string& idx : split(value.substr(6), ',')) {
                cfg.fixed_prt.push_back(static_cast<Index>(parse_int(key, idx)));
            }
            if (cfg.fixed_prt.empty()) {
                throw ConfigError("config: fixed allocation needs at least one index");
            }
        } else {
            throw ConfigError("config: allocation must be 'random' or 'fixed:i,j,...'");
        }
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

void validate(const CampaignConfig& cfg) {
    if (cfg.n_total < 2) {
        throw ConfigError("config: n must be >= 2");
    }
    if (cfg.n_prt < 1 || cfg.n_prt >= cfg.n_total) {
        throw ConfigError("config: n_prt must satisfy 1 <= n_prt < n");
    }
    if (cfg.n_trials < 1) {
        throw ConfigError("config: trials must be >= 1");
    }
    if (cfg.methods.empty()) {
        throw ConfigError("config: methods must not be empty");
    }
    if (cfg.sparse_fp.alpha <= 0.0 || cfg.sparse_fp.epsilon <= 0.0) {
        throw ConfigError("config: alpha and epsilon must be positive");
    }
    if (cfg.sota.omega <= 0.0) {
        throw ConfigError("config: omega must be positive");
    }
    if (cfg.sparse_fp.p_max && *cfg.sparse_fp.p_max <= 0.0) {
        throw ConfigError("config: p_max must be positive");
    }
    if (cfg.sparse_fp.max_fp_iters < 1) {
        throw ConfigError("config: max_fp_iters must be >= 1");
    }
    if (cfg.sparse_fp.convergence_tol <= 0.0) {
        throw ConfigError("config: convergence_tol must be positive");
    }
    if (cfg.threads < 0) {
        throw ConfigError("config: threads must be >= 0");
    }
    if (!cfg.fixed_prt.empty() && static_cast<Index>(cfg.fixed_prt.size()) != cfg.n_prt) {
        throw ConfigError("config: fixed allocation size must equal n_prt");
    }
}

}  // namespace

CampaignConfig parse_campaign_config(std::istream& is, CampaignConfig base) {
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string trimmed = trim(line);
        if (trimmed.empty()) {
            continue;
        }
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not a key=value pair");
        }
        apply_key(base, trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)));
    }
    validate(base);
    return base;
}

CampaignConfig load_campaign_config(const std::filesystem::path& path, CampaignConfig base) {
    std::ifstream is(path);
    if (!is.good()) {
        throw ConfigError("config: cannot open '" + path.string() + "'");
    }
    return parse_campaign_config(is, std::move(base));
}

}  // namespace paprtr
