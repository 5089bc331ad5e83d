#include "parallel_spectra/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace paraspec {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
}

double get_number(const json& obj, const std::string& where, const std::string& key,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + "." + key + ": must be finite");
    return x;
}

int get_int(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError(where + "." + key + ": expected an integer");
    return v.get<int>();
}

ModelSpec parse_model(const json& m, double J) {
    if (!m.contains("variant") || !m.at("variant").is_string())
        throw ConfigError("model: missing string key 'variant'");
    const std::string variant = m.at("variant").get<std::string>();

    if (variant == "uniform") {
        require_keys(m, "model", {"variant", "chain_length"});
        UniformChainSpec spec;
        spec.chain_length = get_int(m, "model", "chain_length");
        spec.hopping = J;
        return spec;
    }
    if (variant == "ssh") {
        require_keys(m, "model", {"variant", "site_count", "delta"});
        SSHChainSpec spec;
        spec.site_count = get_int(m, "model", "site_count");
        spec.dimerization = get_number(m, "model", "delta", 0.0);
        spec.hopping = J;
        return spec;
    }
    if (variant == "custom") {
        require_keys(m, "model",
                     {"variant", "site_count", "edges", "attach_a", "attach_b", "g", "mirror"});
        CustomGraphSpec spec;
        spec.site_count = get_int(m, "model", "site_count");
        if (!m.contains("edges") || !m.at("edges").is_array())
            throw ConfigError("model.edges: expected an array of [site, site, amplitude]");
        for (const auto& e : m.at("edges")) {
            if (!e.is_array() || e.size() != 3 || !e.at(0).is_number_integer() ||
                !e.at(1).is_number_integer() || !e.at(2).is_number())
                throw ConfigError("model.edges: each entry must be [int, int, number]");
            // 1-based in the document
            spec.edges.push_back(GraphEdge{e.at(0).get<int>() - 1, e.at(1).get<int>() - 1,
                                           e.at(2).get<double>()});
        }
        spec.attach_a = get_int(m, "model", "attach_a") - 1;
        spec.attach_b = get_int(m, "model", "attach_b") - 1;
        spec.endpoint_coupling = get_number(m, "model", "g", 0.0);
        if (m.contains("mirror")) {
            if (!m.at("mirror").is_array())
                throw ConfigError("model.mirror: expected an array of site indices");
            std::vector<int> mirror;
            for (const auto& v : m.at("mirror")) {
                if (!v.is_number_integer())
                    throw ConfigError("model.mirror: entries must be integers");
                mirror.push_back(v.get<int>() - 1);
            }
            spec.mirror = std::move(mirror);
        }
        return spec;
    }
    throw ConfigError("model.variant: expected 'uniform', 'ssh' or 'custom', got '" +
                      variant + "'");
}

ScenarioConfig parse_scenario(const json& s) {
    require_keys(s, "scenario",
                 {"dt", "t_max", "dump_times", "packet", "sweep", "audit_tolerance",
                  "truncation_threshold"});
    ScenarioConfig sc;
    sc.dt = get_number(s, "scenario", "dt", sc.dt);
    sc.t_max = get_number(s, "scenario", "t_max", sc.t_max);
    if (!(sc.dt > 0.0)) throw ConfigError("scenario.dt: must be positive");
    if (!(sc.t_max >= 0.0)) throw ConfigError("scenario.t_max: must be non-negative");
    if (s.contains("dump_times")) {
        if (!s.at("dump_times").is_array())
            throw ConfigError("scenario.dump_times: expected an array");
        sc.dump_times.clear();
        for (const auto& v : s.at("dump_times")) {
            if (!v.is_number()) throw ConfigError("scenario.dump_times: entries must be numbers");
            const double t = v.get<double>();
            if (!std::isfinite(t) || t < 0.0)
                throw ConfigError("scenario.dump_times: entries must be finite and >= 0");
            sc.dump_times.push_back(t);
        }
    }
    if (s.contains("packet")) {
        const auto& p = s.at("packet");
        require_keys(p, "scenario.packet", {"center", "momentum", "alpha"});
        if (p.contains("center")) sc.packet.center = get_number(p, "scenario.packet", "center", 0.0);
        sc.packet.momentum = get_number(p, "scenario.packet", "momentum", sc.packet.momentum);
        sc.packet.alpha = get_number(p, "scenario.packet", "alpha", sc.packet.alpha);
        if (!(sc.packet.alpha > 0.0))
            throw ConfigError("scenario.packet.alpha: must be positive");
    }
    if (s.contains("sweep")) {
        const auto& w = s.at("sweep");
        require_keys(w, "scenario.sweep", {"param", "from", "to", "steps"});
        SweepSpec sw;
        if (!w.contains("param") || !w.at("param").is_string())
            throw ConfigError("scenario.sweep: missing string key 'param'");
        sw.param = w.at("param").get<std::string>();
        static const std::set<std::string> kParams = {"gamma", "kappa", "V", "delta"};
        if (!kParams.count(sw.param))
            throw ConfigError("scenario.sweep.param: expected gamma, kappa, V or delta");
        sw.from = get_number(w, "scenario.sweep", "from", 0.0);
        sw.to = get_number(w, "scenario.sweep", "to", 0.0);
        sw.steps = get_int(w, "scenario.sweep", "steps");
        if (sw.steps < 1) throw ConfigError("scenario.sweep.steps: must be >= 1");
        if (sw.to < sw.from) throw ConfigError("scenario.sweep: need from <= to");
        sc.sweep = std::move(sw);
    }
    sc.audit_tolerance = get_number(s, "scenario", "audit_tolerance", sc.audit_tolerance);
    sc.truncation_threshold =
        get_number(s, "scenario", "truncation_threshold", sc.truncation_threshold);
    if (!(sc.audit_tolerance > 0.0) || !(sc.truncation_threshold > 0.0))
        throw ConfigError("scenario: tolerances must be positive");
    return sc;
}

} // namespace

json load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return doc;
}

void apply_override(json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set expects key.path=value, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw; // unquoted strings pass through verbatim
    }

    json* node = &config;
    size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw ConfigError("--set: empty path segment in '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        if (!node->is_object() && !node->is_null())
            throw ConfigError("--set: '" + key + "' is not an object");
        start = dot + 1;
    }
}

RunConfig parse_config(const json& document) {
    require_keys(document, "config", {"model", "params", "tolerances", "scenario"});
    if (!document.contains("model")) throw ConfigError("config: missing 'model' block");

    RunConfig cfg;
    const json params = document.value("params", json::object());
    require_keys(params, "params", {"gamma", "kappa", "V", "J"});
    cfg.params.gamma = get_number(params, "params", "gamma", 0.0);
    cfg.params.kappa = get_number(params, "params", "kappa", 0.0);
    cfg.params.V = get_number(params, "params", "V", 0.0);
    cfg.hopping = get_number(params, "params", "J", 1.0);
    if (cfg.hopping == 0.0) throw ConfigError("params.J: must be nonzero");

    cfg.model = parse_model(document.at("model"), cfg.hopping);

    const json tols = document.value("tolerances", json::object());
    require_keys(tols, "tolerances", {"eig", "real", "match", "norm", "ep"});
    cfg.tol.eig = get_number(tols, "tolerances", "eig", cfg.tol.eig);
    cfg.tol.real = get_number(tols, "tolerances", "real", cfg.tol.real);
    cfg.tol.match = get_number(tols, "tolerances", "match", cfg.tol.match);
    cfg.tol.norm = get_number(tols, "tolerances", "norm", cfg.tol.norm);
    cfg.tol.ep = get_number(tols, "tolerances", "ep", cfg.tol.ep);
    try {
        cfg.tol.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("tolerances: ") + e.what());
    }

    cfg.scenario = parse_scenario(document.value("scenario", json::object()));
    cfg.echo = document;
    return cfg;
}

int total_sites(const ModelSpec& model) {
    return std::visit(
        [](const auto& s) -> int {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, UniformChainSpec>)
                return s.chain_length + 2;
            else if constexpr (std::is_same_v<T, SSHChainSpec>)
                return s.site_count;
            else
                return s.site_count + 2;
        },
        model);
}

} // namespace paraspec
