#include "agesis/config.hpp"
#include "agesis/errors.hpp"
#include "agesis/pseudospectral.hpp"
#include "agesis/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace agesis {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "' has a malformed number: " + value);
    }
}

int parse_int(const std::string& key, const std::string& value) {
    const double x = parse_double(key, value);
    if (x != std::floor(x)) throw config_error("config: key '" + key + "' must be an integer");
    return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw config_error("config: key '" + key + "' must be true or false");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw config_error("config: key '" + key + "' has an empty list");
    return out;
}

bool valid_sweep_param(const std::string& p) { return p == "j" || p == "kd" || p == "r0"; }
bool valid_grid_param(const std::string& p) {
    return p == "j" || p == "kd" || p == "r0" || p == "tau";
}

} // namespace

ScenarioConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(lineno) +
                               " is not of the form key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw config_error("config: line " + std::to_string(lineno) +
                               " has an empty key or value");
        if (kv.count(key)) throw config_error("config: duplicate key '" + key + "'");
        kv[key] = value;
    }

    ScenarioConfig cfg;
    SweepSpec sweep;
    GridSpec grid;
    bool has_sweep = false, has_grid = false;

    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("tau")) cfg.tau = parse_double("tau", *v);
    if (auto v = take("shape_j")) cfg.shape_j = parse_double("shape_j", *v);
    if (auto v = take("kd")) cfg.kd = parse_double("kd", *v);
    if (auto v = take("r0")) cfg.r0 = parse_double("r0", *v);
    if (auto v = take("beta0")) cfg.beta0 = parse_double("beta0", *v);
    if (auto v = take("method")) cfg.method = *v;
    if (auto v = take("d")) cfg.d = parse_int("d", *v);
    if (auto v = take("rho")) cfg.rho = parse_double("rho", *v);
    if (auto v = take("t_end")) cfg.t_end = parse_double("t_end", *v);
    if (auto v = take("rel_tol")) cfg.rel_tol = parse_double("rel_tol", *v);
    if (auto v = take("abs_tol")) cfg.abs_tol = parse_double("abs_tol", *v);
    if (auto v = take("i0")) cfg.i0 = parse_list("i0", *v);
    if (auto v = take("classify")) cfg.classify = parse_bool("classify", *v);
    if (auto v = take("stages")) cfg.stages = parse_bool("stages", *v);
    if (auto v = take("output")) cfg.output = *v;

    if (auto v = take("sweep_param")) { sweep.param = *v; has_sweep = true; }
    if (auto v = take("sweep_from")) { sweep.from = parse_double("sweep_from", *v); has_sweep = true; }
    if (auto v = take("sweep_to")) { sweep.to = parse_double("sweep_to", *v); has_sweep = true; }
    if (auto v = take("sweep_steps")) { sweep.steps = parse_int("sweep_steps", *v); has_sweep = true; }

    if (auto v = take("grid_param")) { grid.p_param = *v; has_grid = true; }
    if (auto v = take("grid_from")) { grid.p_from = parse_double("grid_from", *v); has_grid = true; }
    if (auto v = take("grid_to")) { grid.p_to = parse_double("grid_to", *v); has_grid = true; }
    if (auto v = take("grid_points")) { grid.p_points = parse_int("grid_points", *v); has_grid = true; }
    if (auto v = take("bound_param")) { grid.q_param = *v; has_grid = true; }
    if (auto v = take("bound_from")) { grid.q_from = parse_double("bound_from", *v); has_grid = true; }
    if (auto v = take("bound_to")) { grid.q_to = parse_double("bound_to", *v); has_grid = true; }

    if (!kv.empty()) throw config_error("config: unknown key '" + kv.begin()->first + "'");

    // Validation, with field names in every message.
    if (!(cfg.tau > 0.0)) throw config_error("config: tau must be positive");
    if (!(cfg.shape_j > 0.0)) throw config_error("config: shape_j must be positive");
    if (cfg.kd < 0.0) throw config_error("config: kd must be nonnegative");
    if (cfg.r0.has_value() == cfg.beta0.has_value())
        throw config_error("config: exactly one of r0 / beta0 is required");
    if (cfg.r0 && !(*cfg.r0 > 0.0)) throw config_error("config: r0 must be positive");
    if (cfg.beta0 && *cfg.beta0 < 0.0) throw config_error("config: beta0 must be nonnegative");
    if (cfg.method != "erlang" && cfg.method != "hypoexp" && cfg.method != "pseudospectral")
        throw config_error("config: method must be erlang, hypoexp or pseudospectral");
    if (cfg.method == "hypoexp" && !(cfg.shape_j > 1.0))
        throw config_error("config: method hypoexp requires shape_j > 1");
    if (cfg.d < 4 || cfg.d > 120) throw config_error("config: d must lie in [4, 120]");
    if (cfg.rho && !(*cfg.rho > 0.0)) throw config_error("config: rho must be positive");
    if (cfg.t_end == 0.0) cfg.t_end = 50.0 * cfg.tau;
    if (!(cfg.t_end > 0.0)) throw config_error("config: t_end must be positive");
    if (!(cfg.rel_tol > 0.0)) throw config_error("config: rel_tol must be positive");
    if (!(cfg.abs_tol > 0.0)) throw config_error("config: abs_tol must be positive");
    for (double v : cfg.i0)
        if (!(v >= 0.0) || !(v < 1.0)) throw config_error("config: i0 entries must lie in [0, 1)");

    if (has_sweep) {
        if (!valid_sweep_param(sweep.param))
            throw config_error("config: sweep_param must be j, kd or r0");
        if (!(sweep.to > sweep.from)) throw config_error("config: sweep range must be increasing");
        if (sweep.steps < 2) throw config_error("config: sweep_steps must be at least 2");
        if (sweep.param == "r0" && !cfg.r0)
            throw config_error("config: sweeping r0 requires the r0 key (not beta0)");
        if (sweep.param == "j" && cfg.method != "pseudospectral")
            throw config_error(
                "config: sweeping j continuously requires method = pseudospectral");
        cfg.sweep = sweep;
    }
    if (has_grid) {
        if (!valid_grid_param(grid.p_param) || !valid_grid_param(grid.q_param))
            throw config_error("config: grid_param/bound_param must be j, kd, r0 or tau");
        if (grid.p_param == grid.q_param)
            throw config_error("config: grid_param and bound_param must differ");
        if (!(grid.p_to > grid.p_from)) throw config_error("config: grid range must be increasing");
        if (!(grid.q_to > grid.q_from))
            throw config_error("config: bound range must be increasing");
        if (grid.p_points < 1) throw config_error("config: grid_points must be positive");
        if ((grid.p_param == "r0" || grid.q_param == "r0") && !cfg.r0)
            throw config_error("config: an r0 grid axis requires the r0 key (not beta0)");
        cfg.grid = grid;
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ModelSpec config_model(const ScenarioConfig& cfg) {
    if (cfg.r0) return model_from_r0(cfg.tau, cfg.shape_j, cfg.kd, *cfg.r0);
    return make_model(cfg.tau, cfg.shape_j, cfg.kd, *cfg.beta0);
}

OdeSystem config_system(const ScenarioConfig& cfg) { return config_system_with(cfg, {}); }

OdeSystem config_system_with(const ScenarioConfig& cfg,
                             const std::vector<std::pair<std::string, double>>& overrides) {
    double tau = cfg.tau, j = cfg.shape_j, kd = cfg.kd;
    std::optional<double> r0 = cfg.r0;
    for (const auto& [name, value] : overrides) {
        if (name == "tau") tau = value;
        else if (name == "j") j = value;
        else if (name == "kd") kd = value;
        else if (name == "r0") r0 = value;
        else throw invalid_parameter("config_system_with: unknown parameter " + name);
    }
    const ModelSpec model = r0 ? model_from_r0(tau, j, kd, *r0)
                               : make_model(tau, j, kd, *cfg.beta0);
    if (cfg.method == "erlang") return build_erlang_system(model);
    if (cfg.method == "hypoexp") return build_hypoexp_system(model);
    const double rho = cfg.rho ? *cfg.rho : 2.0 * j / tau;
    return build_ps_system(model, build_scheme(cfg.d, rho));
}

SystemFamily config_family(const ScenarioConfig& cfg) {
    if (!cfg.sweep) throw config_error("config: this command needs a sweep section");
    const std::string param = cfg.sweep->param;
    return [cfg, param](double p) { return config_system_with(cfg, {{param, p}}); };
}

SystemFamily2 config_family2(const ScenarioConfig& cfg) {
    if (!cfg.grid) throw config_error("config: this command needs a grid section");
    const std::string pp = cfg.grid->p_param, qp = cfg.grid->q_param;
    return [cfg, pp, qp](double p, double q) {
        return config_system_with(cfg, {{pp, p}, {qp, q}});
    };
}

} // namespace agesis
