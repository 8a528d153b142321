#include "pv/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "pv/errors.hpp"

namespace pv {

namespace {

const std::set<std::string> kCommands = {"solve", "euler", "verify", "sweep-mu",
                                         "sweep-lambda"};
const std::set<std::string> kKeys = {
    "command", "domain", "n",        "mu",    "lambda", "lambda_list", "mu_list",
    "max_iters", "tol_patch", "tol_x", "x0",  "out",    "field",       "b"};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    double d = parse_double(key, v);
    int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw ConfigError("config: key '" + key + "' must be an integer, got '" + v + "'");
    return i;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("config: key '" + key + "' has an empty list entry");
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("config: key '" + key + "' is an empty list");
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v[i]);
    }
    return out;
}

void apply(RunConfig& cfg, const std::string& key, const std::string& raw) {
    const std::string v = unquote(trim(raw));
    if (key == "command") cfg.command = v;
    else if (key == "domain") cfg.domain_spec = v;
    else if (key == "n") cfg.n = parse_int(key, v);
    else if (key == "mu") cfg.mu = parse_double(key, v);
    else if (key == "lambda") cfg.lambda = parse_double(key, v);
    else if (key == "lambda_list") cfg.lambda_list = parse_list(key, v);
    else if (key == "mu_list") cfg.mu_list = parse_list(key, v);
    else if (key == "max_iters") cfg.max_iters = parse_int(key, v);
    else if (key == "tol_patch") cfg.tol_patch = parse_double(key, v);
    else if (key == "tol_x") cfg.tol_x = parse_double(key, v);
    else if (key == "x0") cfg.x0 = v;
    else if (key == "out") cfg.out_dir = v;
    else if (key == "field") cfg.field_path = v;
    else if (key == "b") cfg.b = parse_double(key, v);
    else throw ConfigError("config: unknown key '" + key + "'");
}

} // namespace

std::map<std::string, std::string> parse_flat_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not of the form key = value");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (!kKeys.count(key))
            throw ConfigError("config: unknown key '" + key + "'");
        if (kv.count(key))
            throw ConfigError("config: duplicate key '" + key + "'");
        kv[key] = val;
    }
    return kv;
}

RunConfig parse_config(const std::string& command, const std::string& config_path,
                       const ConfigOverrides& overrides) {
    RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("config: cannot open '" + config_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        for (const auto& [k, v] : parse_flat_text(ss.str())) apply(cfg, k, v);
    }
    for (const auto& [k, v] : overrides) apply(cfg, k, v);
    if (!command.empty()) cfg.command = command;
    cfg.validate();
    return cfg;
}

std::optional<Vec2> RunConfig::x0_point() const {
    if (x0 == "argmin-H") return std::nullopt;
    std::stringstream ss(x0);
    std::string a, b_;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b_))
        throw ConfigError("config: x0 must be 'argmin-H' or 'x1,x2', got '" + x0 + "'");
    return Vec2(parse_double("x0", trim(a)), parse_double("x0", trim(b_)));
}

void RunConfig::validate() const {
    if (!kCommands.count(command))
        throw ConfigError("config: unknown command '" + command + "'");
    if (domain_spec != "disk" && domain_spec.rfind("mask:", 0) != 0)
        throw ConfigError("config: domain must be \"disk\" or \"mask:<path>\"");
    if (n < 16) throw ConfigError("config: n must be at least 16");
    if (max_iters < 1) throw ConfigError("config: max_iters must be positive");
    if (tol_x <= 0.0) throw ConfigError("config: tol_x must be positive");
    if (out_dir.empty()) throw ConfigError("config: out must not be empty");

    const bool needs_mu =
        command == "solve" || command == "euler" || command == "verify" ||
        command == "sweep-lambda";
    if (needs_mu && !(mu > 0.0))
        throw ConfigError("config: command '" + command + "' requires mu > 0");
    if (command == "euler" && !lambda)
        throw ConfigError("config: command 'euler' requires lambda");
    if (command == "euler" && lambda && *lambda <= mu)
        throw ConfigError("config: lambda must exceed mu");
    if (command == "sweep-mu" && mu_list.empty())
        throw ConfigError("config: command 'sweep-mu' requires mu_list");
    if (command == "sweep-lambda" && lambda_list.empty())
        throw ConfigError("config: command 'sweep-lambda' requires lambda_list");
    if (command == "verify" && field_path.empty())
        throw ConfigError("config: command 'verify' requires field");
    if (command == "verify" && x0 == "argmin-H")
        throw ConfigError("config: command 'verify' requires an explicit x0");
    x0_point();  // syntax check
}

std::string RunConfig::to_text() const {
    std::string out = std::string("# ") + kVersion + "\n";
    out += "command = \"" + command + "\"\n";
    out += "domain = \"" + domain_spec + "\"\n";
    out += "n = " + std::to_string(n) + "\n";
    if (mu > 0.0) out += "mu = " + fmt(mu) + "\n";
    if (lambda) out += "lambda = " + fmt(*lambda) + "\n";
    if (!lambda_list.empty()) out += "lambda_list = " + fmt_list(lambda_list) + "\n";
    if (!mu_list.empty()) out += "mu_list = " + fmt_list(mu_list) + "\n";
    out += "max_iters = " + std::to_string(max_iters) + "\n";
    out += "tol_patch = " + fmt(tol_patch) + "\n";
    out += "tol_x = " + fmt(tol_x) + "\n";
    out += "x0 = \"" + x0 + "\"\n";
    out += "out = \"" + out_dir + "\"\n";
    if (!field_path.empty()) out += "field = \"" + field_path + "\"\n";
    if (b) out += "b = " + fmt(*b) + "\n";
    return out;
}

} // namespace pv
