#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hodge/complex.hpp"
#include "hodge/cyclebasis.hpp"

namespace hodge {

namespace netsim {
struct DistributedResult;
}

/// One generator as written to the result file. `edges` ascend and `signs`
/// holds the matching chain coefficients (+1 or -1).
struct ResultCycle {
    std::vector<EdgeVertices> edges;
    std::vector<int> signs;
    double label = 0.0;               // first coordinate of the label
    Index hop_length = 0;
    EdgeVertices nontree_edge{};
    std::vector<double> integrals;    // one per labelling harmonic
};

struct RunResult {
    std::string mode;  // "centralized" or "distributed"
    Index betti1_estimate = 0;
    std::vector<ResultCycle> cycles;
    std::vector<std::int64_t> iterations_per_harmonic;
    double delta = 0.0;
    Index cycle_basis_size = 0;
    Index contractible_count = 0;
    Index candidate_count = 0;                   // |P|
    std::optional<std::int64_t> messages_total;  // distributed only
};

ResultCycle result_cycle(const SimplicialComplex2& complex, const CycleRecord& record);

RunResult make_result(const SimplicialComplex2& complex, const PipelineResult& result);
RunResult make_result(const SimplicialComplex2& complex, const netsim::DistributedResult& result);

/// Pretty-printed JSON with a trailing newline. Key order is fixed, so equal
/// results give equal bytes.
std::string to_json(const RunResult& result);

/// Throws ParseError on malformed input.
RunResult parse_result(std::istream& in);
RunResult read_result_file(const std::filesystem::path& path);

/// The chain a result cycle stands for. Throws ParseError when an edge is
/// not in the complex, a sign is not +1 or -1, or the lists differ in length.
SparseChain chain_from_cycle(const SimplicialComplex2& complex, const ResultCycle& cycle);

}  // namespace hodge
