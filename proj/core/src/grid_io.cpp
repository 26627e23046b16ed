// SPDX-License-Identifier: MIT
#include "bernstein/grid_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "bernstein/error.hpp"

namespace bernstein {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& tok, int line, int col) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size()) throw ParseError("malformed number '" + tok + "'", line, col);
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

GridField read_grid(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw ParseError("empty grid file", 1, 1);
    if (!header.empty() && header.back() == '\r') header.pop_back();

    std::map<std::string, std::pair<std::string, int>> fields;
    {
        std::size_t pos = 0;
        while (pos < header.size()) {
            while (pos < header.size() && header[pos] == ' ') ++pos;
            if (pos >= header.size()) break;
            const std::size_t start = pos;
            while (pos < header.size() && header[pos] != ' ') ++pos;
            const std::string tok = header.substr(start, pos - start);
            const auto eq = tok.find('=');
            const int col = static_cast<int>(start) + 1;
            if (eq == std::string::npos || eq == 0) throw ParseError("header token '" + tok + "' is not key=value", 1, col);
            const std::string key = tok.substr(0, eq);
            if (key != "dims" && key != "n" && key != "h" && key != "origin" && key != "t") {
                throw ParseError("unknown header key '" + key + "'", 1, col);
            }
            if (fields.count(key)) throw ParseError("duplicate header key '" + key + "'", 1, col);
            fields[key] = {tok.substr(eq + 1), col};
        }
    }
    for (const char* k : {"dims", "n", "h", "origin"}) {
        if (!fields.count(k)) throw ParseError(std::string("header is missing '") + k + "'", 1, 1);
    }

    const auto [dims_s, dims_col] = fields["dims"];
    const double dims_d = parse_double(dims_s, 1, dims_col);
    if (dims_d != 1.0 && dims_d != 2.0) throw ParseError("dims must be 1 or 2", 1, dims_col);
    const int dims = static_cast<int>(dims_d);

    auto per_axis = [&](const std::string& key, bool integral) {
        const auto [text, col] = fields[key];
        const auto parts = split(text, ',');
        if (parts.size() != 1 && static_cast<int>(parts.size()) != dims) {
            throw ParseError("'" + key + "' needs 1 or " + std::to_string(dims) + " values", 1, col);
        }
        std::array<double, 2> v{};
        for (int a = 0; a < dims; ++a) {
            const std::string& p = parts[parts.size() == 1 ? 0 : static_cast<std::size_t>(a)];
            v[static_cast<std::size_t>(a)] = parse_double(p, 1, col);
            if (integral && v[static_cast<std::size_t>(a)] != std::floor(v[static_cast<std::size_t>(a)])) {
                throw ParseError("'" + key + "' must be an integer", 1, col);
            }
        }
        return v;
    };
    const auto nd = per_axis("n", true);
    const auto h = per_axis("h", false);
    const auto origin = per_axis("origin", false);
    std::array<int, 2> n{static_cast<int>(nd[0]), dims == 2 ? static_cast<int>(nd[1]) : 1};
    if (n[0] > 1 << 20 || n[1] > 1 << 20) throw ParseError("grid too large", 1, fields["n"].second);

    GridField g(dims, n, h, origin);
    if (fields.count("t")) g.time = parse_double(fields["t"].first, 1, fields["t"].second);

    std::string line;
    int lineno = 1;
    std::size_t k = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto b = line.find_first_not_of(" \t");
        const auto e = line.find_last_not_of(" \t");
        const std::string tok = line.substr(b, e - b + 1);
        if (k >= g.size()) {
            throw ValidationError("grid: more values than n implies (" + std::to_string(g.size()) + ")");
        }
        const double v = parse_double(tok, lineno, static_cast<int>(b) + 1);
        if (!std::isfinite(v)) throw ValidationError("grid: non-finite value on line " + std::to_string(lineno));
        g[k++] = v;
    }
    if (k != g.size()) {
        throw ValidationError("grid: expected " + std::to_string(g.size()) + " values, found " + std::to_string(k));
    }
    return g;
}

GridField read_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("grid: cannot open '" + path + "'");
    return read_grid(in);
}

void write_grid(const GridField& field, std::ostream& out) {
    field.validate();
    const int d = field.dims();
    auto list = [&](const auto& arr) {
        std::string s = fmt(arr[0]);
        if (d == 2) s += "," + fmt(arr[1]);
        return s;
    };
    out << "dims=" << d << " n=" << field.n()[0];
    if (d == 2) out << "," << field.n()[1];
    out << " h=" << list(field.h()) << " origin=" << list(field.origin());
    if (field.time) out << " t=" << fmt(*field.time);
    out << "\n";
    for (double v : field.values()) out << fmt(v) << "\n";
}

void write_grid(const GridField& field, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("grid: cannot write '" + path + "'");
    write_grid(field, out);
    if (!out) throw ValidationError("grid: write to '" + path + "' failed");
}

}  // namespace bernstein
