#pragma once

#include <polydg/manufactured.hpp>
#include <polydg/method_config.hpp>
#include <polydg/solve.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace polydg {

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Flat key=value run configuration. Lists are comma separated.
struct RunConfig {
    MethodKind method = MethodKind::CDG;
    std::string mesh_type = "voronoi";  // cartesian, triangular, voronoi, agglomerated, file
    std::vector<std::size_t> mesh_n{100};
    std::string mesh_file;
    std::vector<int> degree{1};
    std::string degree_rule = "uniform";  // uniform or annulus
    double gamma = 0.9;
    std::optional<double> chi_override;
    double eta_scale = 10.0;
    double sweep_dx = 1.0, sweep_dy = 0.0;
    Orientation orientation = Orientation::Correct;
    std::string ms = "sincos";
    double solver_tol = 1e-12;
    int solver_maxit = 20000;

    // Command-line only.
    std::uint64_t seed = 1;
    unsigned threads = 1;

    bool operator==(const RunConfig&) const = default;

    FluxConfig flux() const {
        FluxConfig f;
        f.method = method;
        f.sweep_direction = {sweep_dx, sweep_dy};
        f.gamma = gamma;
        f.chi_override = chi_override;
        f.eta_scale = eta_scale;
        f.orientation = orientation;
        return f;
    }

    SolveOptions solver() const {
        SolveOptions s;
        s.tol = solver_tol;
        s.max_iterations = solver_maxit;
        return s;
    }
};

inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "method",  "mesh.type", "mesh.n",  "mesh.file", "degree",      "degree.rule", "gamma",       "chi.override",
        "eta.scale", "sweep.dx", "sweep.dy", "orientation", "ms",       "solver.tol",  "solver.maxit"};
    return keys;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    return out;
}

template <class T>
T parse_number(const std::string& s, const std::string& key) {
    std::istringstream is(s);
    T v{};
    is >> v;
    if (!is || !is.eof())
        throw ConfigError("config: bad value \"" + s + "\" for key " + key);
    return v;
}

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

}  // namespace detail

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
    using detail::parse_number;
    if (key == "method") {
        c.method = parse_method(value);
    } else if (key == "mesh.type") {
        if (value != "cartesian" && value != "triangular" && value != "voronoi" && value != "agglomerated" &&
            value != "file")
            throw ConfigError("config: unknown mesh.type \"" + value + "\"");
        c.mesh_type = value;
    } else if (key == "mesh.n") {
        c.mesh_n.clear();
        for (const std::string& s : detail::split_list(value)) {
            const long n = parse_number<long>(s, key);
            if (n < 1)
                throw ConfigError("config: mesh.n must be positive");
            c.mesh_n.push_back(static_cast<std::size_t>(n));
        }
    } else if (key == "mesh.file") {
        c.mesh_file = value;
    } else if (key == "degree") {
        c.degree.clear();
        for (const std::string& s : detail::split_list(value)) {
            const int p = parse_number<int>(s, key);
            if (p < 0 || p > 12)
                throw ConfigError("config: degree must be in [0, 12]");
            c.degree.push_back(p);
        }
    } else if (key == "degree.rule") {
        if (value != "uniform" && value != "annulus")
            throw ConfigError("config: unknown degree.rule \"" + value + "\" (expected uniform or annulus)");
        c.degree_rule = value;
    } else if (key == "gamma") {
        c.gamma = parse_number<double>(value, key);
    } else if (key == "chi.override") {
        if (value == "none" || value.empty())
            c.chi_override.reset();
        else
            c.chi_override = parse_number<double>(value, key);
    } else if (key == "eta.scale") {
        c.eta_scale = parse_number<double>(value, key);
    } else if (key == "sweep.dx") {
        c.sweep_dx = parse_number<double>(value, key);
    } else if (key == "sweep.dy") {
        c.sweep_dy = parse_number<double>(value, key);
    } else if (key == "orientation") {
        if (value == "correct")
            c.orientation = Orientation::Correct;
        else if (value == "inverted")
            c.orientation = Orientation::Inverted;
        else
            throw ConfigError("config: orientation must be correct or inverted");
    } else if (key == "ms") {
        solution_by_name(value);
        c.ms = value;
    } else if (key == "solver.tol") {
        c.solver_tol = parse_number<double>(value, key);
    } else if (key == "solver.maxit") {
        c.solver_maxit = parse_number<int>(value, key);
    } else {
        throw ConfigError("config: unknown key \"" + key + "\"");
    }
}

inline void validate(const RunConfig& c) {
    if (c.mesh_n.empty() || c.degree.empty())
        throw ConfigError("config: mesh.n and degree need at least one value");
    if (c.mesh_type == "file" && c.mesh_file.empty())
        throw ConfigError("config: mesh.type=file needs mesh.file");
    if (!c.mesh_file.empty() && !std::ifstream(c.mesh_file))
        throw ConfigError("config: mesh.file \"" + c.mesh_file + "\" not found");
    if (!(c.solver_tol > 0.0) || c.solver_maxit < 1)
        throw ConfigError("config: solver.tol and solver.maxit must be positive");
    try {
        c.flux().validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

/// Parse key=value lines; '#' starts a comment. Errors carry the line number.
inline RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = detail::trim(line.substr(0, eq));
        try {
            set_config_value(c, key, detail::trim(line.substr(eq + 1)));
        } catch (const Error& e) {
            throw ConfigError("config line " + std::to_string(lineno) + " (" + key + "): " + e.what());
        }
    }
    validate(c);
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline std::string serialize_config(const RunConfig& c) {
    using detail::format_double;
    std::ostringstream os;
    os << "method=" << to_string(c.method) << "\n"
       << "mesh.type=" << c.mesh_type << "\n"
       << "mesh.n=" << detail::join(c.mesh_n) << "\n";
    if (!c.mesh_file.empty())
        os << "mesh.file=" << c.mesh_file << "\n";
    os << "degree=" << detail::join(c.degree) << "\n"
       << "degree.rule=" << c.degree_rule << "\n"
       << "gamma=" << format_double(c.gamma) << "\n"
       << "chi.override=" << (c.chi_override ? format_double(*c.chi_override) : "none") << "\n"
       << "eta.scale=" << format_double(c.eta_scale) << "\n"
       << "sweep.dx=" << format_double(c.sweep_dx) << "\n"
       << "sweep.dy=" << format_double(c.sweep_dy) << "\n"
       << "orientation=" << (c.orientation == Orientation::Correct ? "correct" : "inverted") << "\n"
       << "ms=" << c.ms << "\n"
       << "solver.tol=" << format_double(c.solver_tol) << "\n"
       << "solver.maxit=" << c.solver_maxit << "\n";
    return os.str();
}

}  // namespace polydg
