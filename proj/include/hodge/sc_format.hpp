#pragma once

#include <filesystem>
#include <iosfwd>

#include "hodge/complex.hpp"

namespace hodge {

// ".sc" text format, one record per line:
//   v <N>
//   e <i> <j>        (i < j, sorted, unique)
//   t <i> <j> <k>    (i < j < k, sorted, unique)
// Lines starting with '#' and blank lines are ignored. Edges precede
// triangles.

SimplicialComplex2 read_sc(std::istream& in);
SimplicialComplex2 read_sc_file(const std::filesystem::path& path);

void write_sc(std::ostream& out, const SimplicialComplex2& complex);
void write_sc_file(const std::filesystem::path& path, const SimplicialComplex2& complex);

}  // namespace hodge
