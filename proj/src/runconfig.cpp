#include "klx/runconfig.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "klx/types.hpp"

namespace klx {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for '" + key + "': " + v);
    }
}

long long to_ll(const std::string& key, const std::string& v) {
    double x = to_double(key, v);
    if (x < 0 || x != std::floor(x))
        throw ConfigError("config: '" + key + "' must be a nonnegative integer");
    return static_cast<long long>(x);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "process") process = value;
    else if (key == "weight") weight = value;
    else if (key == "alpha") alpha = to_double(key, value);
    else if (key == "count") count = static_cast<int>(to_ll(key, value));
    else if (key == "paths") paths = to_ll(key, value);
    else if (key == "terms") terms = static_cast<int>(to_ll(key, value));
    else if (key == "eps") {
        eps.clear();
        std::stringstream ss(value);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (!tok.empty()) eps.push_back(to_double(key, tok));
        }
    } else if (key == "seed") seed = static_cast<std::uint64_t>(to_ll(key, value));
    else if (key == "grid") grid = static_cast<int>(to_ll(key, value));
    else if (key == "method") method = value;
    else if (key == "form") form = value;
    else if (key == "suite") suite = value;
    else if (key == "out") out = value;
    else if (key == "format") format = value;
    else if (key == "slepian_c") slepian_c = to_double(key, value);
    else if (key == "kernel_csv") kernel_csv = value;
    else throw ConfigError("config: unknown key '" + key + "'");
}

std::string RunConfig::canonical() const {
    std::ostringstream os;
    os << "alpha = " << num(alpha) << "\n";
    os << "count = " << count << "\n";
    std::string e;
    for (std::size_t i = 0; i < eps.size(); ++i) e += (i ? "," : "") + num(eps[i]);
    os << "eps = " << e << "\n";
    os << "form = " << form << "\n";
    os << "format = " << format << "\n";
    os << "grid = " << grid << "\n";
    if (!kernel_csv.empty()) os << "kernel_csv = " << kernel_csv << "\n";
    os << "method = " << method << "\n";
    os << "out = " << out << "\n";
    os << "paths = " << paths << "\n";
    os << "process = " << process << "\n";
    os << "seed = " << seed << "\n";
    os << "slepian_c = " << num(slepian_c) << "\n";
    os << "suite = " << suite << "\n";
    os << "terms = " << terms << "\n";
    os << "weight = " << weight << "\n";
    return os.str();
}

RunConfig parse_config_text(const std::string& text, std::set<std::string>* keys_seen) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(s.substr(0, eq));
        cfg.set(key, trim(s.substr(eq + 1)));
        if (keys_seen) keys_seen->insert(key);
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path, std::set<std::string>* keys_seen) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), keys_seen);
}

}  // namespace klx
