#include "etdelay/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "etdelay/error.hpp"

namespace etdelay {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

const json& object_at(const json& parent, const std::string& key, const std::string& path) {
    const std::string here = join(path, key);
    if (!parent.contains(key)) throw ConfigError(here, "missing required object");
    const json& j = parent.at(key);
    if (!j.is_object()) throw ConfigError(here, "expected an object");
    return j;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& path) {
    for (const auto& item : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return item.key() == k; });
        if (!known) throw ConfigError(join(path, item.key()), "unknown key");
    }
}

double number_at(const json& j, const std::string& key, const std::string& path) {
    const std::string here = join(path, key);
    if (!j.contains(key)) throw ConfigError(here, "missing required number");
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(here, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(here, "must be finite");
    return d;
}

double number_or(const json& j, const std::string& key, const std::string& path, double fallback) {
    return j.contains(key) ? number_at(j, key, path) : fallback;
}

long long integer_or(const json& j, const std::string& key, const std::string& path,
                     long long fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
    return v.get<long long>();
}

std::string string_at(const json& j, const std::string& key, const std::string& path) {
    const std::string here = join(path, key);
    if (!j.contains(key)) throw ConfigError(here, "missing required string");
    const json& v = j.at(key);
    if (!v.is_string()) throw ConfigError(here, "expected a string");
    return v.get<std::string>();
}

std::string string_or(const json& j, const std::string& key, const std::string& path,
                      const std::string& fallback) {
    return j.contains(key) ? string_at(j, key, path) : fallback;
}

Matrix matrix_at(const json& j, const std::string& key, const std::string& path) {
    const std::string here = join(path, key);
    if (!j.contains(key)) throw ConfigError(here, "missing required matrix");
    const json& rows = j.at(key);
    if (!rows.is_array() || rows.empty()) throw ConfigError(here, "expected a non-empty array of rows");
    std::size_t cols = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const json& row = rows[i];
        if (!row.is_array() || row.empty()) {
            throw ConfigError(here + "[" + std::to_string(i) + "]", "expected a non-empty row array");
        }
        if (i == 0) cols = row.size();
        if (row.size() != cols) {
            throw ConfigError(here + "[" + std::to_string(i) + "]", "row length differs from row 0");
        }
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < cols; ++k) {
            const json& v = rows[i][k];
            if (!v.is_number() || !std::isfinite(v.get<double>())) {
                throw ConfigError(here + "[" + std::to_string(i) + "][" + std::to_string(k) + "]",
                                  "expected a finite number");
            }
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v.get<double>();
        }
    }
    return m;
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(row);
    }
    return rows;
}

std::string shape(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

bool same_matrix(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

bool same_optional(const std::optional<Matrix>& a, const std::optional<Matrix>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || same_matrix(*a, *b);
}

ScenarioConfig parse_document(const json& doc) {
    if (!doc.is_object()) throw ConfigError("", "top level must be a JSON object");
    check_keys(doc, {"name", "system", "synthesis", "trigger", "controller", "sim", "output"}, "");

    ScenarioConfig cfg;
    cfg.name = string_or(doc, "name", "", "scenario");

    const json& sys = object_at(doc, "system", "");
    check_keys(sys, {"A1", "A2", "B", "tau", "tau_bar", "phi"}, "system");
    cfg.A1 = matrix_at(sys, "A1", "system");
    cfg.A2 = matrix_at(sys, "A2", "system");
    cfg.B = matrix_at(sys, "B", "system");
    cfg.tau = string_at(sys, "tau", "system");
    cfg.tau_bar = number_at(sys, "tau_bar", "system");
    if (!sys.contains("phi") || !sys.at("phi").is_array()) {
        throw ConfigError("system.phi", "expected an array of expression strings");
    }
    for (std::size_t i = 0; i < sys.at("phi").size(); ++i) {
        const json& e = sys.at("phi")[i];
        if (!e.is_string()) {
            throw ConfigError("system.phi[" + std::to_string(i) + "]", "expected a string");
        }
        cfg.phi.push_back(e.get<std::string>());
    }

    const json& syn = object_at(doc, "synthesis", "");
    check_keys(syn, {"b", "h"}, "synthesis");
    cfg.synthesis.b = number_at(syn, "b", "synthesis");
    cfg.synthesis.h = number_at(syn, "h", "synthesis");

    const json& trg = object_at(doc, "trigger", "");
    check_keys(trg, {"alpha", "beta", "sigma", "baseline_mode"}, "trigger");
    cfg.trigger.alpha = number_at(trg, "alpha", "trigger");
    cfg.trigger.beta = number_at(trg, "beta", "trigger");
    cfg.trigger.sigma = number_at(trg, "sigma", "trigger");
    try {
        cfg.trigger.baseline_mode =
            baseline_mode_from_string(string_or(trg, "baseline_mode", "trigger", "history-sup"));
    } catch (const InputError& e) {
        throw ConfigError("trigger.baseline_mode", e.what());
    }

    const json& ctl = object_at(doc, "controller", "");
    check_keys(ctl, {"mode", "P", "Q", "K", "R", "seed", "restarts", "margin", "max_iterations"},
               "controller");
    cfg.controller.mode = string_at(ctl, "mode", "controller");
    if (cfg.controller.mode != "synthesize" && cfg.controller.mode != "verify") {
        throw ConfigError("controller.mode", "expected \"synthesize\" or \"verify\"");
    }
    for (const char* key : {"P", "Q", "K", "R"}) {
        if (!ctl.contains(key)) continue;
        Matrix m = matrix_at(ctl, key, "controller");
        if (std::string(key) == "P") cfg.controller.P = std::move(m);
        if (std::string(key) == "Q") cfg.controller.Q = std::move(m);
        if (std::string(key) == "K") cfg.controller.K = std::move(m);
        if (std::string(key) == "R") cfg.controller.R = std::move(m);
    }
    SynthesisOptions& opt = cfg.controller.synthesis;
    const long long seed = integer_or(ctl, "seed", "controller", static_cast<long long>(opt.seed));
    if (seed < 0) throw ConfigError("controller.seed", "must be non-negative");
    opt.seed = static_cast<std::uint64_t>(seed);
    opt.restarts = static_cast<int>(integer_or(ctl, "restarts", "controller", opt.restarts));
    opt.margin = number_or(ctl, "margin", "controller", opt.margin);
    opt.max_iterations =
        static_cast<int>(integer_or(ctl, "max_iterations", "controller", opt.max_iterations));

    if (doc.contains("sim")) {
        const json& sim = object_at(doc, "sim", "");
        check_keys(sim, {"step", "horizon", "event_tol", "max_events", "interp"}, "sim");
        cfg.sim.step = number_or(sim, "step", "sim", cfg.sim.step);
        cfg.sim.horizon = number_or(sim, "horizon", "sim", cfg.sim.horizon);
        cfg.sim.event_tol = number_or(sim, "event_tol", "sim", cfg.sim.event_tol);
        cfg.sim.max_events = static_cast<int>(integer_or(sim, "max_events", "sim", cfg.sim.max_events));
        try {
            cfg.sim.interp = interp_from_string(string_or(sim, "interp", "sim", "linear"));
        } catch (const InputError& e) {
            throw ConfigError("sim.interp", e.what());
        }
    }

    if (doc.contains("output")) {
        const json& out = object_at(doc, "output", "");
        check_keys(out, {"dir", "trajectory", "events", "report"}, "output");
        cfg.output.dir = string_or(out, "dir", "output", cfg.output.dir);
        cfg.output.trajectory = string_or(out, "trajectory", "output", cfg.output.trajectory);
        cfg.output.events = string_or(out, "events", "output", cfg.output.events);
        cfg.output.report = string_or(out, "report", "output", cfg.output.report);
    }

    validate_config(cfg);
    return cfg;
}

} // namespace

bool ControllerSpec::operator==(const ControllerSpec& other) const {
    return mode == other.mode && same_optional(P, other.P) && same_optional(Q, other.Q) &&
           same_optional(K, other.K) && same_optional(R, other.R) && synthesis == other.synthesis;
}

bool ScenarioConfig::operator==(const ScenarioConfig& other) const {
    return name == other.name && same_matrix(A1, other.A1) && same_matrix(A2, other.A2) &&
           same_matrix(B, other.B) && tau == other.tau && tau_bar == other.tau_bar &&
           phi == other.phi && synthesis == other.synthesis && trigger == other.trigger &&
           controller == other.controller && sim == other.sim && output == other.output;
}

void validate_config(const ScenarioConfig& cfg) {
    const Eigen::Index n = cfg.A1.rows();
    if (cfg.A1.rows() != cfg.A1.cols()) {
        throw ConfigError("system.A1", "must be square, got " + shape(cfg.A1));
    }
    if (cfg.A2.rows() != n || cfg.A2.cols() != n) {
        throw ConfigError("system.A2", "is " + shape(cfg.A2) + " but system.A1 is " + shape(cfg.A1));
    }
    if (cfg.B.rows() != n) {
        throw ConfigError("system.B", "is " + shape(cfg.B) + " but system.A1 is " + shape(cfg.A1) +
                                          " (B needs " + std::to_string(n) + " rows)");
    }
    const Eigen::Index m = cfg.B.cols();
    if (static_cast<Eigen::Index>(cfg.phi.size()) != n) {
        throw ConfigError("system.phi", "has " + std::to_string(cfg.phi.size()) +
                                            " entries but system.A1 is " + shape(cfg.A1));
    }
    if (!(cfg.tau_bar >= 0.0)) throw ConfigError("system.tau_bar", "must be non-negative");
    try {
        parse_expr(cfg.tau, "t");
    } catch (const InputError& e) {
        throw ConfigError("system.tau", e.what());
    }
    for (std::size_t i = 0; i < cfg.phi.size(); ++i) {
        try {
            parse_expr(cfg.phi[i], "s");
        } catch (const InputError& e) {
            throw ConfigError("system.phi[" + std::to_string(i) + "]", e.what());
        }
    }
    if (!(cfg.synthesis.b > 0.0)) throw ConfigError("synthesis.b", "must be positive");
    if (!(cfg.synthesis.h > 0.0)) throw ConfigError("synthesis.h", "must be positive");
    if (!(cfg.trigger.alpha > 0.0)) throw ConfigError("trigger.alpha", "must be positive");
    if (!(cfg.trigger.beta > 0.0)) throw ConfigError("trigger.beta", "must be positive");
    if (!(cfg.trigger.sigma >= 0.0)) throw ConfigError("trigger.sigma", "must be non-negative");

    const ControllerSpec& c = cfg.controller;
    auto check = [&](const std::optional<Matrix>& mat, const char* key, Eigen::Index rows,
                     Eigen::Index cols, const char* against) {
        if (mat && (mat->rows() != rows || mat->cols() != cols)) {
            throw ConfigError(std::string("controller.") + key,
                              "is " + shape(*mat) + " but must be " + std::to_string(rows) + "x" +
                                  std::to_string(cols) + " to match " + against);
        }
    };
    check(c.P, "P", n, n, "system.A1");
    check(c.Q, "Q", n, n, "system.A1");
    check(c.K, "K", m, n, "system.B and system.A1");
    check(c.R, "R", m, n, "system.B and system.A1");
    if (c.mode == "verify") {
        if (c.P.has_value() == c.Q.has_value()) {
            throw ConfigError("controller", "verify mode needs exactly one of P or Q");
        }
        if (c.K.has_value() == c.R.has_value()) {
            throw ConfigError("controller", "verify mode needs exactly one of K or R");
        }
    } else if (c.P || c.Q || c.K || c.R) {
        throw ConfigError("controller", "synthesize mode does not take P, Q, K or R");
    }
    if (c.synthesis.restarts < 1) throw ConfigError("controller.restarts", "must be at least 1");
    if (c.synthesis.max_iterations < 1) {
        throw ConfigError("controller.max_iterations", "must be at least 1");
    }
    if (!(c.synthesis.margin >= 0.0)) throw ConfigError("controller.margin", "must be non-negative");

    if (!(cfg.sim.step > 0.0)) throw ConfigError("sim.step", "must be positive");
    if (!(cfg.sim.horizon > 0.0)) throw ConfigError("sim.horizon", "must be positive");
    if (!(cfg.sim.event_tol > 0.0) || !(cfg.sim.event_tol < cfg.sim.step)) {
        throw ConfigError("sim.event_tol", "must be positive and smaller than sim.step");
    }
    if (cfg.sim.max_events < 1) throw ConfigError("sim.max_events", "must be at least 1");
}

ScenarioConfig config_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_document(doc);
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

std::string config_to_json_text(const ScenarioConfig& cfg) {
    json doc = json::object();
    doc["name"] = cfg.name;
    doc["system"] = {{"A1", matrix_json(cfg.A1)}, {"A2", matrix_json(cfg.A2)},
                     {"B", matrix_json(cfg.B)},   {"tau", cfg.tau},
                     {"tau_bar", cfg.tau_bar},    {"phi", cfg.phi}};
    doc["synthesis"] = {{"b", cfg.synthesis.b}, {"h", cfg.synthesis.h}};
    doc["trigger"] = {{"alpha", cfg.trigger.alpha},
                      {"beta", cfg.trigger.beta},
                      {"sigma", cfg.trigger.sigma},
                      {"baseline_mode", to_string(cfg.trigger.baseline_mode)}};
    json ctl = {{"mode", cfg.controller.mode}};
    if (cfg.controller.mode == "synthesize") {
        ctl["seed"] = cfg.controller.synthesis.seed;
        ctl["restarts"] = cfg.controller.synthesis.restarts;
        ctl["margin"] = cfg.controller.synthesis.margin;
        ctl["max_iterations"] = cfg.controller.synthesis.max_iterations;
    } else {
        ctl["margin"] = cfg.controller.synthesis.margin;
    }
    if (cfg.controller.P) ctl["P"] = matrix_json(*cfg.controller.P);
    if (cfg.controller.Q) ctl["Q"] = matrix_json(*cfg.controller.Q);
    if (cfg.controller.K) ctl["K"] = matrix_json(*cfg.controller.K);
    if (cfg.controller.R) ctl["R"] = matrix_json(*cfg.controller.R);
    doc["controller"] = ctl;
    doc["sim"] = {{"step", cfg.sim.step},
                  {"horizon", cfg.sim.horizon},
                  {"event_tol", cfg.sim.event_tol},
                  {"max_events", cfg.sim.max_events},
                  {"interp", to_string(cfg.sim.interp)}};
    doc["output"] = {{"dir", cfg.output.dir},
                     {"trajectory", cfg.output.trajectory},
                     {"events", cfg.output.events},
                     {"report", cfg.output.report}};
    return doc.dump(2) + "\n";
}

LinearDelaySystem build_system(const ScenarioConfig& cfg) {
    validate_config(cfg);
    LinearDelaySystem sys{{cfg.A1, cfg.A2, cfg.B}, parse_expr(cfg.tau, "t"), cfg.tau_bar, {}};
    for (const auto& text : cfg.phi) sys.phi.push_back(parse_expr(text, "s"));
    return sys;
}

DesignMode build_mode(const ScenarioConfig& cfg) {
    if (cfg.controller.mode == "synthesize") return SynthesizeMode{cfg.controller.synthesis};
    return VerifyMode{cfg.controller.P, cfg.controller.Q, cfg.controller.K, cfg.controller.R,
                      cfg.controller.synthesis.margin};
}

} // namespace etdelay
