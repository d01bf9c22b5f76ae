#pragma once

#include <polydg/mesh.hpp>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace polydg {

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::size_t line_at(const std::string& text, std::size_t pos) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos && i < text.size(); ++i)
        if (text[i] == '\n')
            ++line;
    return line;
}

/// Line of the k-th element of the top-level array stored under `key`.
inline std::size_t line_of_entry(const std::string& text, const std::string& key, std::size_t k) {
    const std::size_t kpos = text.find("\"" + key + "\"");
    if (kpos == std::string::npos)
        return 1;
    std::size_t pos = text.find('[', kpos);
    int depth = 0;
    std::size_t count = 0;
    for (; pos < text.size(); ++pos) {
        const char ch = text[pos];
        if (ch == '[') {
            ++depth;
            if (depth == 2) {
                if (count == k)
                    return line_at(text, pos);
                ++count;
            }
        } else if (ch == ']') {
            if (--depth == 0)
                break;
        }
    }
    return line_at(text, kpos);
}

}  // namespace detail

/// Parse the ".pmesh.json" text format. Clockwise loops are reversed and
/// reported through `warnings` (or std::clog when null).
inline Mesh parse_mesh(const std::string& text, std::vector<std::string>* warnings = nullptr) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), detail::line_at(text, e.byte));
    }
    if (!j.is_object() || !j.contains("vertices") || !j.contains("cells"))
        throw ParseError("mesh file needs \"vertices\" and \"cells\"", 1);
    for (const auto& [k, v] : j.items())
        if (k != "vertices" && k != "cells" && k != "neumann")
            throw ParseError("unknown key \"" + k + "\"", detail::line_at(text, text.find("\"" + k + "\"")));

    std::vector<Point2> verts;
    const auto& jv = j.at("vertices");
    if (!jv.is_array())
        throw ParseError("\"vertices\" must be an array", 1);
    for (std::size_t i = 0; i < jv.size(); ++i) {
        const auto& p = jv[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw ParseError("vertex " + std::to_string(i) + " must be [x, y]",
                             detail::line_of_entry(text, "vertices", i));
        verts.push_back({p[0].get<double>(), p[1].get<double>()});
    }

    std::vector<std::vector<index_t>> loops;
    const auto& jc = j.at("cells");
    if (!jc.is_array())
        throw ParseError("\"cells\" must be an array", 1);
    for (std::size_t k = 0; k < jc.size(); ++k) {
        const std::size_t line = detail::line_of_entry(text, "cells", k);
        const auto& c = jc[k];
        if (!c.is_array())
            throw ParseError("cell " + std::to_string(k) + " must be an array of vertex indices", line);
        std::vector<index_t> loop;
        for (const auto& v : c) {
            if (!v.is_number_integer() || v.get<long long>() < 0)
                throw ParseError("cell " + std::to_string(k) + " has a non-integer vertex index", line);
            const auto id = static_cast<index_t>(v.get<long long>());
            if (id >= verts.size())
                throw ParseError("cell " + std::to_string(k) + " references undefined vertex " + std::to_string(id),
                                 line);
            loop.push_back(id);
        }
        if (loop.size() > 1 && loop.front() == loop.back())
            loop.pop_back();
        if (loop.size() < 3)
            throw ParseError("cell " + std::to_string(k) + " is an open polygon (fewer than 3 vertices)", line);
        std::vector<Point2> poly;
        for (index_t v : loop)
            poly.push_back(verts[v]);
        if (!is_simple(poly))
            throw ParseError("cell " + std::to_string(k) + " is self-intersecting", line);
        const double a = signed_area(poly);
        if (a == 0.0)
            throw ParseError("cell " + std::to_string(k) + " has zero area", line);
        if (a < 0.0) {
            std::reverse(loop.begin(), loop.end());
            const std::string msg =
                "line " + std::to_string(line) + ": cell " + std::to_string(k) + " was clockwise; reoriented";
            if (warnings)
                warnings->push_back(msg);
            else
                std::clog << "warning: " << msg << '\n';
        }
        loops.push_back(std::move(loop));
    }

    std::vector<Segment> neumann;
    if (j.contains("neumann")) {
        const auto& jn = j.at("neumann");
        for (std::size_t i = 0; i < jn.size(); ++i) {
            const auto& s = jn[i];
            if (!s.is_array() || s.size() != 2 || s[0].size() != 2 || s[1].size() != 2)
                throw ParseError("neumann segment " + std::to_string(i) + " must be [[x0,y0],[x1,y1]]",
                                 detail::line_of_entry(text, "neumann", i));
            neumann.push_back({{s[0][0].get<double>(), s[0][1].get<double>()},
                               {s[1][0].get<double>(), s[1][1].get<double>()}});
        }
    }

    Mesh m;
    try {
        m = build_mesh(std::move(verts), std::move(loops));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what(), 1);
    }
    return classify_boundary(std::move(m), neumann);
}

inline Mesh load_mesh(const std::string& path, std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in)
        throw Error("load_mesh: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_mesh(ss.str(), warnings);
}

inline std::string format_mesh(const Mesh& m) {
    std::ostringstream os;
    char buf[80];
    os << "{\n\"vertices\": [\n";
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", m.vertices[i].x, m.vertices[i].y);
        os << "  " << buf << (i + 1 < m.vertices.size() ? ",\n" : "\n");
    }
    os << "],\n\"cells\": [\n";
    for (std::size_t k = 0; k < m.elements.size(); ++k) {
        os << "  [";
        const auto& vs = m.elements[k].vertices;
        for (std::size_t i = 0; i < vs.size(); ++i)
            os << vs[i] << (i + 1 < vs.size() ? ", " : "");
        os << (k + 1 < m.elements.size() ? "],\n" : "]\n");
    }
    os << "],\n\"neumann\": [";
    bool first = true;
    for (const Facet& f : m.facets) {
        if (f.kind != FacetKind::Neumann)
            continue;
        std::snprintf(buf, sizeof buf, "[[%.17g, %.17g], [%.17g, %.17g]]", f.a.x, f.a.y, f.b.x, f.b.y);
        os << (first ? "\n  " : ",\n  ") << buf;
        first = false;
    }
    os << (first ? "]\n}\n" : "\n]\n}\n");
    return os.str();
}

inline void save_mesh(const Mesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("save_mesh: cannot write " + path);
    out << format_mesh(m);
}

}  // namespace polydg
