// hodge: command-line driver.
//
// Exit codes: 0 ok, 1 verification failed, 2 generation failed (too
// sparse), 3 harmonic iteration did not converge, 4 harmonics did not
// separate the candidate cycles, 64 usage error or unreadable input.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hodge/complex.hpp"
#include "hodge/cyclebasis.hpp"
#include "hodge/errors.hpp"
#include "hodge/experiments.hpp"
#include "hodge/geomgraph.hpp"
#include "hodge/harmonic.hpp"
#include "hodge/netsim/protocols.hpp"
#include "hodge/oracle.hpp"
#include "hodge/result_io.hpp"
#include "hodge/sc_format.hpp"

#ifndef HODGE_VERSION
#define HODGE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using hodge::SimplicialComplex2;

namespace {

enum Exit : int { kOk = 0, kVerifyFailed = 1, kGeneration = 2, kConvergence = 3, kRank = 4, kUsage = 64 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class LogLevel { Quiet, Info, Debug };

LogLevel log_level() {
    const char* env = std::getenv("HODGE_LOG");
    if (env == nullptr) return LogLevel::Quiet;
    const std::string v(env);
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    return LogLevel::Quiet;
}

void info(const std::string& line) {
    if (log_level() != LogLevel::Quiet) std::cerr << "hodge: " << line << '\n';
}

/// Writes to `path`, or to stdout when it is empty.
void emit(const std::string& path, const std::string& bytes) {
    if (path.empty()) {
        std::cout << bytes;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << bytes;
}

/// `<dir>/<stem><suffix>` next to `out`.
std::string sibling(const std::string& out, const std::string& suffix) {
    const fs::path p(out);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

SimplicialComplex2 load_complex(const std::string& path) {
    try {
        return hodge::read_sc_file(path);
    } catch (const hodge::Error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

/// Everything needed to reproduce an output; the only place wall-clock data
/// appears.
class Manifest {
public:
    Manifest(std::string subcommand, const CLI::App& app) : subcommand_(std::move(subcommand)) {
        for (const CLI::Option* opt : app.get_options()) {
            if (opt->get_name() == "--help" || opt->count() == 0) continue;
            const auto& results = opt->results();
            std::string name = opt->get_name();
            while (!name.empty() && name.front() == '-') name.erase(name.begin());
            flags_[name] = results.size() == 1 ? ordered_json(results.front()) : ordered_json(results);
        }
    }

    void seed(std::uint64_t s) { seeds_.push_back(s); }
    void input(const std::string& path) { inputs_.push_back(path); }
    void output(const std::string& path) {
        if (!path.empty()) outputs_.push_back(path);
    }

    /// Written next to the first output; nothing when output went to stdout.
    void write(const std::string& primary_output) const {
        if (primary_output.empty()) return;
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));

        ordered_json j;
        j["subcommand"] = subcommand_;
        j["flags"] = flags_;
        j["seeds"] = seeds_;
        j["inputs"] = inputs_;
        j["outputs"] = outputs_;
        j["tool_version"] = HODGE_VERSION;
        j["wall_time_seconds"] = wall;
        j["finished_utc"] = stamp;
        emit(sibling(primary_output, ".manifest.json"), j.dump(2) + "\n");
    }

private:
    std::string subcommand_;
    ordered_json flags_ = ordered_json::object();
    std::vector<std::uint64_t> seeds_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ---- gen ----------------------------------------------------------------

struct GenOptions {
    int n = 0;
    double avg_degree = 6.0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gen(const GenOptions& o, const CLI::App& app) {
    Manifest manifest("gen", app);
    manifest.seed(o.seed);
    const SimplicialComplex2 complex = hodge::geom::generate({o.n, o.avg_degree, o.seed});
    std::ostringstream text;
    hodge::write_sc(text, complex);
    emit(o.out, text.str());
    info("generated " + std::to_string(complex.vertex_count()) + " vertices, " +
         std::to_string(complex.edge_count()) + " edges, " + std::to_string(complex.triangle_count()) +
         " triangles");
    manifest.output(o.out);
    manifest.write(o.out);
    return kOk;
}

// ---- run ----------------------------------------------------------------

struct RunOptions {
    std::string input;
    std::string mode = "centralized";
    double epsilon = 1e-6;
    std::optional<double> delta;
    std::optional<std::int64_t> max_iters;
    double label_tol = 1e-4;
    double pivot_tol = 1e-8;
    double contractible_tol = 1e-4;
    int label_harmonics = 1;
    std::uint64_t seed = 0;
    std::string root = "max-id";
    std::string scheduling = "sync";
    int residual_period = 1;
    std::string transcript;
    std::string out;
};

int cmd_run(const RunOptions& o, const CLI::App& app) {
    Manifest manifest("run", app);
    manifest.seed(o.seed);
    manifest.input(o.input);
    const SimplicialComplex2 complex = load_complex(o.input);

    hodge::PipelineConfig pc;
    pc.harmonic.epsilon = o.epsilon;
    pc.harmonic.seed = o.seed;
    pc.harmonic.delta = o.delta;
    pc.harmonic.max_iterations = o.max_iters;
    pc.label_tol = o.label_tol;
    pc.pivot_tol = o.pivot_tol;
    pc.contractible.absolute = o.contractible_tol;
    pc.label_harmonics = o.label_harmonics;
    if (o.root != "max-id") {
        std::size_t used = 0;
        int id = -1;
        try {
            id = std::stoi(o.root, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != o.root.size() || id < 0 || id >= complex.vertex_count())
            throw UsageError("--root must be max-id or a vertex id below " + std::to_string(complex.vertex_count()));
        pc.root = id;
    }

    hodge::RunResult result;
    if (o.mode == "centralized") {
        result = hodge::make_result(complex, hodge::run_centralized(complex, pc));
    } else {
        hodge::netsim::SimConfig sim;
        sim.scheduling = o.scheduling == "async" ? hodge::netsim::Scheduling::Asynchronous
                                                 : hodge::netsim::Scheduling::Synchronous;
        sim.async_seed = o.seed;
        sim.residual_check_period = o.residual_period;
        sim.record_transcript = !o.transcript.empty() || log_level() == LogLevel::Debug;
        std::ofstream transcript;
        if (!o.transcript.empty()) {
            transcript.open(o.transcript, std::ios::binary);
            if (!transcript) throw UsageError("cannot write " + o.transcript);
        }
        const bool debug = log_level() == LogLevel::Debug;
        sim.transcript_sink = [&transcript, debug](const std::string& line) {
            if (transcript.is_open()) transcript << line << '\n';
            if (debug) std::cerr << line << '\n';
        };
        const hodge::netsim::DistributedResult dr = hodge::netsim::run_full_pipeline(complex, pc, sim);
        result = hodge::make_result(complex, dr);

        if (transcript.is_open()) {
            transcript.close();
            if (!transcript) throw UsageError("cannot write " + o.transcript);
            manifest.output(o.transcript);
        }
        if (!o.out.empty()) {
            std::ostringstream csv;
            dr.cost.write_csv(csv);
            const std::string cost_path = sibling(o.out, ".cost.csv");
            emit(cost_path, csv.str());
            manifest.output(cost_path);
        }
        info("messages " + std::to_string(dr.cost.total_broadcasts()) + ", delivered " +
             std::to_string(dr.delivered));
    }
    info("betti1 estimate " + std::to_string(result.betti1_estimate) + ", |P| " +
         std::to_string(result.candidate_count));
    emit(o.out, hodge::to_json(result));
    manifest.output(o.out);
    manifest.write(o.out);
    return kOk;
}

// ---- oracle / verify ----------------------------------------------------

struct OracleOptions {
    std::string input;
};

int cmd_oracle(const OracleOptions& o) {
    const SimplicialComplex2 complex = load_complex(o.input);
    std::cout << hodge::oracle::betti1(hodge::build_boundaries(complex)) << '\n';
    return kOk;
}

struct VerifyOptions {
    std::string input;
    std::string result;
};

int cmd_verify(const VerifyOptions& o) {
    const SimplicialComplex2 complex = load_complex(o.input);
    const hodge::oracle::HomologyOracle oracle(hodge::build_boundaries(complex));
    // An unreadable or malformed file is a usage error; a well-formed result
    // that does not check out is a verification failure.
    const hodge::RunResult result = hodge::read_result_file(o.result);
    std::vector<hodge::SparseChain> chains;
    try {
        if (result.betti1_estimate != static_cast<hodge::Index>(result.cycles.size())) {
            std::cout << "FAIL betti1_estimate " << result.betti1_estimate << " but " << result.cycles.size()
                      << " cycles\n";
            return kVerifyFailed;
        }
        for (const hodge::ResultCycle& c : result.cycles) {
            chains.push_back(hodge::chain_from_cycle(complex, c));
            oracle.require_cycle(chains.back());
        }
    } catch (const hodge::Error& e) {
        std::cout << "FAIL " << e.what() << '\n';
        return kVerifyFailed;
    }
    if (!oracle.verify_generating_set(chains)) {
        std::cout << "FAIL " << chains.size() << " cycles do not generate H1 (b1 = " << oracle.betti1() << ")\n";
        return kVerifyFailed;
    }
    std::cout << "OK " << chains.size() << " independent generators, b1 = " << oracle.betti1() << '\n';
    return kOk;
}

// ---- experiment ---------------------------------------------------------

struct ExperimentOptions {
    std::string n_range = "100:600:100";
    double avg_degree = 6.0;
    int trials = 20;
    std::uint64_t seed_base = 0;
    std::string mode = "centralized";
    double epsilon = 1e-6;
    unsigned jobs = 1;
    int n = 200;
    std::uint64_t graph_seed = 1;
    std::string digits = "2:8";
    std::string out;
};

hodge::experiments::IntRange range_flag(const std::string& text, const char* flag) {
    try {
        return hodge::experiments::parse_range(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

/// CSV sink that flushes each row, so a crash keeps the finished rows.
class CsvSink {
public:
    CsvSink(const std::string& path, const char* header) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw UsageError("cannot write " + path);
        }
        out() << header << '\n';
    }
    std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    template <typename Row>
    void operator()(const Row& row) {
        hodge::experiments::write_row(out(), row);
        out().flush();
    }

private:
    std::ofstream file_;
};

int cmd_experiment_excess(const ExperimentOptions& o, const CLI::App& app) {
    Manifest manifest("experiment excess-cycles", app);
    manifest.seed(o.seed_base);
    hodge::experiments::ExcessConfig c;
    c.n = range_flag(o.n_range, "--n-range");
    c.avg_degree = o.avg_degree;
    c.trials = o.trials;
    c.seed_base = o.seed_base;
    c.mode = o.mode == "distributed" ? hodge::experiments::Mode::Distributed : hodge::experiments::Mode::Centralized;
    c.pipeline.harmonic.epsilon = o.epsilon;
    c.jobs = o.jobs;
    CsvSink sink(o.out, hodge::experiments::kExcessHeader);
    hodge::experiments::excess_cycles(c, [&](const hodge::experiments::ExcessRow& r) { sink(r); });
    manifest.output(o.out);
    manifest.write(o.out);
    return kOk;
}

int cmd_experiment_digits(const ExperimentOptions& o, const CLI::App& app) {
    Manifest manifest("experiment iterations", app);
    manifest.seed(o.graph_seed);
    manifest.seed(o.seed_base);
    hodge::experiments::DigitsConfig c;
    c.n = o.n;
    c.avg_degree = o.avg_degree;
    c.graph_seed = o.graph_seed;
    c.digits = range_flag(o.digits, "--digits");
    c.trials = o.trials;
    c.seed_base = o.seed_base;
    c.jobs = o.jobs;
    CsvSink sink(o.out, hodge::experiments::kDigitsHeader);
    hodge::experiments::iterations_vs_digits(c, [&](const hodge::experiments::DigitsRow& r) { sink(r); });
    manifest.output(o.out);
    manifest.write(o.out);
    return kOk;
}

int cmd_experiment_size(const ExperimentOptions& o, const CLI::App& app) {
    Manifest manifest("experiment iterations-vs-n", app);
    manifest.seed(o.seed_base);
    hodge::experiments::SizeConfig c;
    c.n = range_flag(o.n_range, "--n-range");
    c.avg_degree = o.avg_degree;
    c.trials = o.trials;
    c.epsilon = o.epsilon;
    c.seed_base = o.seed_base;
    c.jobs = o.jobs;
    CsvSink sink(o.out, hodge::experiments::kSizeHeader);
    hodge::experiments::iterations_vs_n(c, [&](const hodge::experiments::SizeRow& r) { sink(r); });
    manifest.output(o.out);
    manifest.write(o.out);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Homology generators from harmonics of the combinatorial Hodge Laplacian"};
    app.set_version_flag("--version", HODGE_VERSION);
    app.require_subcommand(1);

    const auto positive = CLI::PositiveNumber;

    GenOptions gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "Random geometric flag complex (.sc)");
    gen_cmd->add_option("--n", gen.n, "Number of points")->required()->check(CLI::Range(2, 1 << 24));
    gen_cmd->add_option("--avg-degree", gen.avg_degree, "Target average degree")->check(positive);
    gen_cmd->add_option("--seed", gen.seed, "Sample seed");
    gen_cmd->add_option("--out", gen.out, "Output .sc file (default stdout)");

    RunOptions run;
    CLI::App* run_cmd = app.add_subcommand("run", "Compute homology generators (result JSON)");
    run_cmd->add_option("--input", run.input, ".sc complex")->required();
    run_cmd->add_option("--mode", run.mode)->check(CLI::IsMember({"centralized", "distributed"}));
    run_cmd->add_option("--epsilon", run.epsilon, "Harmonic accuracy")->check(CLI::Range(1e-15, 0.5));
    run_cmd->add_option("--delta", run.delta, "Step size (default 1 / ||L1||_1)")->check(positive);
    run_cmd->add_option("--max-iters", run.max_iters, "Iteration cap per harmonic (default 100 |E| digits)")
        ->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 40));
    run_cmd->add_option("--label-tol", run.label_tol, "Relative label match tolerance")->check(positive);
    run_cmd->add_option("--pivot-tol", run.pivot_tol, "Gram-Schmidt keep threshold")->check(positive);
    run_cmd->add_option("--contractible-tol", run.contractible_tol, "Absolute integral threshold")->check(positive);
    run_cmd->add_option("--label-harmonics", run.label_harmonics, "Harmonics used for labels")
        ->check(CLI::Range(1, 64));
    run_cmd->add_option("--seed", run.seed, "Base seed of the harmonic start vectors and async delays");
    run_cmd->add_option("--root", run.root, "max-id or a vertex id");
    run_cmd->add_option("--scheduling", run.scheduling)->check(CLI::IsMember({"sync", "async"}));
    run_cmd->add_option("--residual-period", run.residual_period, "Iterations between termination checks")
        ->check(CLI::Range(1, 1 << 20));
    run_cmd->add_option("--transcript", run.transcript, "Write the message transcript (distributed)");
    run_cmd->add_option("--out", run.out, "Result JSON (default stdout)");

    OracleOptions oracle;
    CLI::App* oracle_cmd = app.add_subcommand("oracle", "Print the exact first Betti number");
    oracle_cmd->add_option("--input", oracle.input, ".sc complex")->required();

    VerifyOptions verify;
    CLI::App* verify_cmd = app.add_subcommand("verify", "Check a result against the exact oracle");
    verify_cmd->add_option("--input", verify.input, ".sc complex")->required();
    verify_cmd->add_option("--result", verify.result, "Result JSON")->required();

    ExperimentOptions ex;
    CLI::App* ex_cmd = app.add_subcommand("experiment", "Parameter sweeps written as CSV");
    ex_cmd->require_subcommand(1);
    const auto common = [&](CLI::App* c) {
        c->add_option("--avg-degree", ex.avg_degree)->check(positive);
        c->add_option("--trials", ex.trials)->check(CLI::Range(1, 1 << 20));
        c->add_option("--seed-base", ex.seed_base);
        c->add_option("--jobs", ex.jobs, "Worker threads; output does not depend on it")->check(CLI::Range(1u, 256u));
        c->add_option("--out", ex.out, "CSV file (default stdout)");
    };
    CLI::App* excess_cmd = ex_cmd->add_subcommand("excess-cycles", "|P| - b1 against n");
    common(excess_cmd);
    excess_cmd->add_option("--n-range", ex.n_range, "a:b:s");
    excess_cmd->add_option("--mode", ex.mode)->check(CLI::IsMember({"centralized", "distributed"}));
    excess_cmd->add_option("--epsilon", ex.epsilon)->check(CLI::Range(1e-15, 0.5));
    CLI::App* digits_cmd = ex_cmd->add_subcommand("iterations", "Iterations against required digits");
    common(digits_cmd);
    digits_cmd->add_option("--n", ex.n)->check(CLI::Range(2, 1 << 24));
    digits_cmd->add_option("--graph-seed", ex.graph_seed);
    digits_cmd->add_option("--digits", ex.digits, "a:b");
    CLI::App* size_cmd = ex_cmd->add_subcommand("iterations-vs-n", "Iterations against n");
    common(size_cmd);
    size_cmd->add_option("--n-range", ex.n_range, "a:b:s");
    size_cmd->add_option("--epsilon", ex.epsilon)->check(CLI::Range(1e-15, 0.5));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen, *gen_cmd);
        if (run_cmd->parsed()) return cmd_run(run, *run_cmd);
        if (oracle_cmd->parsed()) return cmd_oracle(oracle);
        if (verify_cmd->parsed()) return cmd_verify(verify);
        if (excess_cmd->parsed()) return cmd_experiment_excess(ex, *excess_cmd);
        if (digits_cmd->parsed()) return cmd_experiment_digits(ex, *digits_cmd);
        if (size_cmd->parsed()) return cmd_experiment_size(ex, *size_cmd);
    } catch (const UsageError& e) {
        std::cerr << "hodge: " << e.what() << '\n';
        return kUsage;
    } catch (const hodge::TooSparse& e) {
        std::cerr << "hodge: generation failed: " << e.what() << '\n';
        return kGeneration;
    } catch (const hodge::MaxIterationsExceeded& e) {
        std::cerr << "hodge: " << e.what() << '\n';
        return kConvergence;
    } catch (const hodge::RankDeficientHarmonics& e) {
        std::cerr << "hodge: " << e.what() << "; try another --seed\n";
        return kRank;
    } catch (const std::exception& e) {
        std::cerr << "hodge: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
