#include "hodge/sc_format.hpp"

#include <fstream>
#include <limits>
#include <optional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "hodge/errors.hpp"

namespace hodge {

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

template <std::size_t K>
std::array<Index, K> read_indices(std::istringstream& fields, std::size_t line_no) {
    std::array<Index, K> out{};
    for (auto& v : out) {
        long long x = 0;
        if (!(fields >> x)) fail(line_no, "expected " + std::to_string(K) + " vertex indices");
        if (x < 0 || x > std::numeric_limits<Index>::max()) fail(line_no, "vertex index out of range");
        v = static_cast<Index>(x);
    }
    std::string extra;
    if (fields >> extra) fail(line_no, "trailing field '" + extra + "'");
    return out;
}

}  // namespace

SimplicialComplex2 read_sc(std::istream& in) {
    std::optional<Index> vertex_count;
    std::vector<EdgeVertices> edges;
    std::vector<TriangleVertices> triangles;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream fields(line);
        std::string tag;
        fields >> tag;
        if (tag == "v") {
            if (vertex_count) fail(line_no, "duplicate 'v' record");
            const auto [n] = read_indices<1>(fields, line_no);
            vertex_count = n;
        } else if (tag == "e") {
            if (!vertex_count) fail(line_no, "'e' before 'v'");
            if (!triangles.empty()) fail(line_no, "edge after triangles");
            const auto e = read_indices<2>(fields, line_no);
            if (!edges.empty() && !(edges.back() < e)) fail(line_no, "edge records unsorted or duplicated");
            edges.push_back(e);
        } else if (tag == "t") {
            if (!vertex_count) fail(line_no, "'t' before 'v'");
            const auto t = read_indices<3>(fields, line_no);
            if (!triangles.empty() && !(triangles.back() < t)) fail(line_no, "triangle records unsorted or duplicated");
            triangles.push_back(t);
        } else {
            fail(line_no, "unknown record '" + tag + "'");
        }
    }
    if (!vertex_count) throw ParseError("missing 'v' record");
    return SimplicialComplex2(*vertex_count, std::move(edges), std::move(triangles));
}

SimplicialComplex2 read_sc_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_sc(in);
}

void write_sc(std::ostream& out, const SimplicialComplex2& complex) {
    out << "v " << complex.vertex_count() << '\n';
    for (const auto& [i, j] : complex.edges()) out << "e " << i << ' ' << j << '\n';
    for (const auto& [i, j, k] : complex.triangles()) out << "t " << i << ' ' << j << ' ' << k << '\n';
}

void write_sc_file(const std::filesystem::path& path, const SimplicialComplex2& complex) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path.string());
    write_sc(out, complex);
}

}  // namespace hodge
