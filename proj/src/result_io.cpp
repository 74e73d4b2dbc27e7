#include "hodge/result_io.hpp"

#include <fstream>
#include <istream>

#include <nlohmann/json.hpp>

#include "hodge/errors.hpp"
#include "hodge/netsim/protocols.hpp"

namespace hodge {

using nlohmann::ordered_json;

ResultCycle result_cycle(const SimplicialComplex2& complex, const CycleRecord& record) {
    ResultCycle out;
    // Edge ids follow lexicographic vertex order, so iterating the chain by id
    // yields sorted edges.
    for (SparseChain::InnerIterator it(record.chain); it; ++it) {
        if (it.value() == 0.0) continue;
        out.edges.push_back(complex.edge(it.index()));
        out.signs.push_back(it.value() > 0.0 ? 1 : -1);
    }
    out.label = record.label.empty() ? 0.0 : record.label.front();
    out.hop_length = record.hop_length;
    out.nontree_edge = complex.edge(record.nontree_edge);
    out.integrals = record.integrals;
    return out;
}

namespace {

template <typename Pipeline>
RunResult common_fields(const SimplicialComplex2& complex, const Pipeline& result) {
    RunResult out;
    out.betti1_estimate = static_cast<Index>(result.generators.H.size());
    for (const CycleRecord& r : result.generators.H) out.cycles.push_back(result_cycle(complex, r));
    out.iterations_per_harmonic = result.iterations_per_harmonic;
    out.delta = result.delta;
    out.cycle_basis_size = result.cycle_basis_size;
    out.contractible_count = result.contractible_count;
    out.candidate_count = static_cast<Index>(result.generators.P.size());
    return out;
}

[[noreturn]] void fail(const std::string& what) { throw ParseError("result file: " + what); }

}  // namespace

RunResult make_result(const SimplicialComplex2& complex, const PipelineResult& result) {
    RunResult out = common_fields(complex, result);
    out.mode = "centralized";
    return out;
}

RunResult make_result(const SimplicialComplex2& complex, const netsim::DistributedResult& result) {
    RunResult out = common_fields(complex, result);
    out.mode = "distributed";
    out.messages_total = result.cost.total_broadcasts();
    return out;
}

std::string to_json(const RunResult& result) {
    ordered_json j;
    j["betti1_estimate"] = result.betti1_estimate;
    ordered_json cycles = ordered_json::array();
    for (const ResultCycle& c : result.cycles) {
        ordered_json jc;
        jc["edges"] = c.edges;
        jc["signs"] = c.signs;
        jc["label"] = c.label;
        jc["hop_length"] = c.hop_length;
        jc["nontree_edge"] = c.nontree_edge;
        jc["integrals"] = c.integrals;
        cycles.push_back(std::move(jc));
    }
    j["cycles"] = std::move(cycles);
    j["iterations_per_harmonic"] = result.iterations_per_harmonic;
    j["delta"] = result.delta;
    j["mode"] = result.mode;
    j["cycle_basis_size"] = result.cycle_basis_size;
    j["contractible_count"] = result.contractible_count;
    j["candidate_count"] = result.candidate_count;
    if (result.messages_total) j["messages_total"] = *result.messages_total;
    return j.dump(2) + "\n";
}

RunResult parse_result(std::istream& in) {
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const ordered_json::parse_error& e) {
        fail(e.what());
    }
    RunResult out;
    try {
        out.betti1_estimate = j.at("betti1_estimate").get<Index>();
        for (const auto& jc : j.at("cycles")) {
            ResultCycle c;
            c.edges = jc.at("edges").get<std::vector<EdgeVertices>>();
            c.signs = jc.at("signs").get<std::vector<int>>();
            c.label = jc.value("label", 0.0);
            c.hop_length = jc.value("hop_length", Index{0});
            if (jc.contains("nontree_edge")) c.nontree_edge = jc["nontree_edge"].get<EdgeVertices>();
            if (jc.contains("integrals")) c.integrals = jc["integrals"].get<std::vector<double>>();
            out.cycles.push_back(std::move(c));
        }
        out.iterations_per_harmonic = j.value("iterations_per_harmonic", std::vector<std::int64_t>{});
        out.delta = j.value("delta", 0.0);
        out.mode = j.value("mode", std::string{});
        out.cycle_basis_size = j.value("cycle_basis_size", Index{0});
        out.contractible_count = j.value("contractible_count", Index{0});
        out.candidate_count = j.value("candidate_count", Index{0});
        if (j.contains("messages_total")) out.messages_total = j["messages_total"].get<std::int64_t>();
    } catch (const ordered_json::exception& e) {
        fail(e.what());
    }
    return out;
}

RunResult read_result_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return parse_result(in);
}

SparseChain chain_from_cycle(const SimplicialComplex2& complex, const ResultCycle& cycle) {
    if (cycle.edges.size() != cycle.signs.size()) fail("edges and signs differ in length");
    SparseChain chain(complex.edge_count());
    for (std::size_t i = 0; i < cycle.edges.size(); ++i) {
        const auto [u, v] = cycle.edges[i];
        if (u >= v) fail("edge vertices must ascend");
        const auto e = complex.edge_index(u, v);
        if (!e) fail("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") is not in the complex");
        const int s = cycle.signs[i];
        if (s != 1 && s != -1) fail("sign must be +1 or -1");
        if (chain.coeff(*e) != 0.0) fail("edge listed twice");
        chain.coeffRef(*e) = s;
    }
    return chain;
}

}  // namespace hodge
