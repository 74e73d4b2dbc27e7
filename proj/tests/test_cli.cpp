#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "hodge/complex.hpp"
#include "hodge/oracle.hpp"
#include "hodge/result_io.hpp"
#include "hodge/sc_format.hpp"
#include "support/fixtures.hpp"

using namespace hodge;
namespace fs = std::filesystem;

namespace {

/// Scratch directory under the build tree, emptied per test case.
struct Workdir {
    fs::path dir;
    explicit Workdir(const std::string& name) : dir(fs::path(HODGE_TEST_TMP) / name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    std::string operator/(const std::string& file) const { return (dir / file).string(); }
};

/// Exit status of `hodge <args>`; stdout goes to `stdout_path` when given.
int run_cli(const std::string& args, const std::string& stdout_path = "") {
    std::string cmd = std::string("\"") + HODGE_CLI + "\" " + args;
    cmd += stdout_path.empty() ? " >/dev/null" : " >\"" + stdout_path + "\"";
    cmd += " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_complex(const std::string& path, const SimplicialComplex2& k) {
    std::ofstream out(path);
    write_sc(out, k);
}

std::vector<SparseChain> chains(const SimplicialComplex2& k, const RunResult& r) {
    std::vector<SparseChain> out;
    for (const auto& c : r.cycles) out.push_back(chain_from_cycle(k, c));
    return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen") {
    const Workdir w("gen");
    CHECK(run_cli("gen --n 2 --avg-degree 100 --seed 1 --out " + w / "a.sc") == 0);
    std::ifstream in(w / "a.sc");
    const auto k = read_sc(in);
    CHECK(k.vertex_count() == 2);
    CHECK(k.edge_count() == 1);

    CHECK(run_cli("gen --n 150 --seed 9 --out " + w / "x.sc") == 0);
    CHECK(run_cli("gen --n 150 --seed 9 --out " + w / "y.sc") == 0);
    CHECK(slurp(w / "x.sc") == slurp(w / "y.sc"));
    CHECK(fs::exists(w / "x.manifest.json"));

    CHECK(run_cli("gen --n 0 --out " + w / "z.sc") == 64);
    CHECK(run_cli("gen --n 50 --avg-degree 0.0001 --out " + w / "z.sc") == 2);
    CHECK(run_cli("frobnicate") == 64);
}

TEST_CASE("run on the two triangles") {
    const Workdir w("triangles");
    write_complex(w / "hollow.sc", fixtures::hollow_triangle());
    write_complex(w / "filled.sc", fixtures::filled_triangle());

    CHECK(run_cli("run --input " + w / "hollow.sc" + " --out " + w / "hollow.json") == 0);
    const auto hollow = read_result_file(w / "hollow.json");
    CHECK(hollow.betti1_estimate == 1);
    REQUIRE(hollow.cycles.size() == 1);
    CHECK(hollow.cycles[0].edges == std::vector<EdgeVertices>{{0, 1}, {0, 2}, {1, 2}});

    CHECK(run_cli("run --input " + w / "filled.sc" + " --out " + w / "filled.json") == 0);
    const std::string filled = slurp(w / "filled.json");
    CHECK(filled.find("\"betti1_estimate\": 0") != std::string::npos);
    CHECK(filled.find("\"cycles\": []") != std::string::npos);
}

TEST_CASE("run: both modes agree and outputs are reproducible") {
    const Workdir w("modes");
    CHECK(run_cli("gen --n 120 --seed 4 --out " + w / "g.sc") == 0);
    std::ifstream in(w / "g.sc");
    const auto k = read_sc(in);
    const oracle::HomologyOracle o(build_boundaries(k));

    const std::string common = "run --input " + w / "g.sc" + " --seed 7";
    CHECK(run_cli(common + " --out " + w / "c.json") == 0);
    CHECK(run_cli(common + " --mode distributed --out " + w / "d.json") == 0);
    CHECK(run_cli(common + " --mode distributed --out " + w / "d2.json") == 0);
    CHECK(slurp(w / "d.json") == slurp(w / "d2.json"));
    CHECK(slurp(w / "d.cost.csv") == slurp(w / "d2.cost.csv"));
    CHECK(slurp(w / "d.cost.csv").rfind("phase,node_id,broadcasts,packets_received,payload_floats\n", 0) == 0);
    CHECK(slurp(w / "d.manifest.json").find("\"subcommand\": \"run\"") != std::string::npos);

    const auto c = read_result_file(w / "c.json");
    const auto d = read_result_file(w / "d.json");
    CHECK(c.betti1_estimate == o.betti1());
    CHECK(d.betti1_estimate == c.betti1_estimate);
    CHECK(d.messages_total.has_value());
    const auto cc = chains(k, c), dc = chains(k, d);
    for (const auto& x : dc)
        CHECK(std::count_if(cc.begin(), cc.end(), [&](const SparseChain& y) { return o.are_homologous(x, y); }) == 1);

    CHECK(run_cli(common + " --out " + w / "c2.json") == 0);
    CHECK(slurp(w / "c.json") == slurp(w / "c2.json"));
}

TEST_CASE("transcripts stream to a file and do not change the result") {
    const Workdir w("transcript");
    write_complex(w / "eight.sc", fixtures::figure_eight());
    const std::string common = "run --input " + w / "eight.sc" + " --mode distributed --scheduling async";
    CHECK(run_cli(common + " --transcript " + w / "t1.txt" + " --out " + w / "a.json") == 0);
    CHECK(run_cli(common + " --transcript " + w / "t2.txt" + " --out " + w / "b.json") == 0);
    CHECK(run_cli(common + " --out " + w / "c.json") == 0);
    const std::string t = slurp(w / "t1.txt");
    CHECK(t.rfind("t=0 ", 0) == 0);
    CHECK(t == slurp(w / "t2.txt"));
    CHECK(slurp(w / "a.json") == slurp(w / "c.json"));
    CHECK(slurp(w / "a.manifest.json").find("t1.txt") != std::string::npos);
}

TEST_CASE("run errors map to exit codes") {
    const Workdir w("errors");
    CHECK(run_cli("gen --n 80 --seed 2 --out " + w / "g.sc") == 0);
    CHECK(run_cli("run --input " + w / "g.sc" + " --max-iters 3") == 3);
    CHECK(run_cli("run --input " + w / "missing.sc") == 64);
    CHECK(run_cli("run --input " + w / "g.sc" + " --root 100000") == 64);
    CHECK(run_cli("run --input " + w / "g.sc" + " --mode sideways") == 64);
    std::ofstream(w / "bad.sc") << "v 3\ne 0 1\ne 0 1\n";
    CHECK(run_cli("run --input " + w / "bad.sc") == 64);
}

TEST_CASE("oracle and verify") {
    const Workdir w("verify");
    write_complex(w / "eight.sc", fixtures::figure_eight());
    CHECK(run_cli("oracle --input " + w / "eight.sc", w / "b1.txt") == 0);
    CHECK(slurp(w / "b1.txt") == "2\n");

    CHECK(run_cli("run --input " + w / "eight.sc" + " --out " + w / "r.json") == 0);
    CHECK(run_cli("verify --input " + w / "eight.sc" + " --result " + w / "r.json") == 0);

    auto r = read_result_file(w / "r.json");
    REQUIRE(r.cycles.size() == 2);
    r.cycles[1] = r.cycles[0];
    std::ofstream(w / "dup.json") << to_json(r);
    CHECK(run_cli("verify --input " + w / "eight.sc" + " --result " + w / "dup.json") == 1);

    r.cycles.pop_back();
    r.betti1_estimate = 1;
    std::ofstream(w / "short.json") << to_json(r);
    CHECK(run_cli("verify --input " + w / "eight.sc" + " --result " + w / "short.json") == 1);
    std::ofstream(w / "junk.json") << "{";
    CHECK(run_cli("verify --input " + w / "eight.sc" + " --result " + w / "junk.json") == 64);
}

TEST_CASE("experiments") {
    const Workdir w("experiments");
    CHECK(run_cli("experiment excess-cycles --n-range 60 --trials 1 --out " + w / "e.csv") == 0);
    const std::string e = slurp(w / "e.csv");
    CHECK(std::count(e.begin(), e.end(), '\n') == 2);
    CHECK(e.rfind("n,seed,b1,card_P,excess,iterations,messages_total,error\n", 0) == 0);

    CHECK(run_cli("experiment iterations --n 60 --digits 2:4 --trials 2 --out " + w / "i.csv") == 0);
    CHECK(run_cli("experiment iterations --n 60 --digits 2:4 --trials 2 --jobs 2 --out " + w / "i2.csv") == 0);
    const std::string digits = slurp(w / "i.csv");
    CHECK(digits == slurp(w / "i2.csv"));
    CHECK(std::count(digits.begin(), digits.end(), '\n') == 1 + 2 * 3);

    CHECK(run_cli("experiment iterations-vs-n --n-range 40:60:20 --trials 1 --out " + w / "s.csv") == 0);
    CHECK(slurp(w / "s.csv").rfind("n,seed,nodes,edges,delta,iterations,error\n", 0) == 0);
    CHECK(run_cli("experiment excess-cycles --n-range 9:1") == 64);
}

}  // TEST_SUITE
