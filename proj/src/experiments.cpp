#include "hodge/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "hodge/errors.hpp"
#include "hodge/geomgraph.hpp"
#include "hodge/harmonic.hpp"
#include "hodge/netsim/protocols.hpp"
#include "hodge/oracle.hpp"
#include "hodge/prng.hpp"

namespace hodge::experiments {

std::vector<int> IntRange::values() const {
    if (step <= 0) throw std::invalid_argument("range step must be positive");
    std::vector<int> out;
    for (int v = first; v <= last; v += step) out.push_back(v);
    return out;
}

IntRange parse_range(const std::string& text) {
    std::vector<int> parts;
    std::size_t begin = 0;
    while (true) {
        const std::size_t colon = text.find(':', begin);
        const std::string field = text.substr(begin, colon == std::string::npos ? std::string::npos : colon - begin);
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(field, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (field.empty() || used != field.size()) throw std::invalid_argument("bad range '" + text + "'");
        parts.push_back(value);
        if (colon == std::string::npos) break;
        begin = colon + 1;
    }
    if (parts.size() > 3) throw std::invalid_argument("bad range '" + text + "'");
    IntRange r{parts[0], parts.size() > 1 ? parts[1] : parts[0], parts.size() > 2 ? parts[2] : 1};
    if (r.step <= 0 || r.last < r.first) throw std::invalid_argument("empty range '" + text + "'");
    return r;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear fit needs two or more points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear fit needs two distinct x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy == 0.0 ? (ss_res == 0.0 ? 1.0 : 0.0) : 1.0 - ss_res / syy;
    return fit;
}

std::uint64_t trial_seed(std::uint64_t seed_base, std::uint64_t index) { return derive_seed(seed_base, index); }

std::uint64_t trial_seed(std::uint64_t seed_base, int n, int trial) {
    return trial_seed(trial_seed(seed_base, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(trial));
}

namespace {

/// fn(i) for i < count on up to `jobs` threads; emit(i-th result) in index
/// order, as soon as the prefix up to i is complete.
template <typename Row, typename Fn>
std::vector<Row> run_trials(std::size_t count, unsigned jobs, Fn&& fn, const std::function<void(const Row&)>& emit) {
    std::vector<Row> rows(count);
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            rows[i] = fn(i);
            if (emit) emit(rows[i]);
        }
        return rows;
    }
    std::vector<char> done(count, 0);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < std::min<std::size_t>(jobs, count); ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                Row row = fn(i);
                std::lock_guard lock(mu);
                rows[i] = std::move(row);
                done[i] = 1;
                cv.notify_all();
            }
        });
    }
    for (std::size_t i = 0; i < count; ++i) {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return done[i] != 0; });
        lock.unlock();
        if (emit) emit(rows[i]);
    }
    for (auto& t : workers) t.join();
    return rows;
}

/// Error text safe inside one CSV field.
std::string csv_field(std::string text) {
    for (char& c : text)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
    return text;
}

template <typename T>
void put(std::ostream& out, const std::optional<T>& v) {
    if (v) out << *v;
}

void put(std::ostream& out, const std::optional<double>& v) {
    if (!v) return;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    out << buf;
}

double epsilon_for(int digits) { return std::pow(10.0, -digits); }

}  // namespace

// ---- excess cycles ------------------------------------------------------

std::optional<Index> ExcessRow::excess() const {
    if (!b1 || !card_P) return std::nullopt;
    return *card_P - *b1;
}

ExcessRow excess_trial(const ExcessConfig& config, int n, std::uint64_t seed) {
    ExcessRow row;
    row.n = n;
    row.seed = seed;
    try {
        const SimplicialComplex2 complex = geom::generate({n, config.avg_degree, seed});
        row.b1 = oracle::betti1(build_boundaries(complex));
        PipelineConfig pc = config.pipeline;
        pc.reduce = false;
        pc.harmonic.seed = seed;
        std::vector<std::int64_t> iterations;
        if (config.mode == Mode::Centralized) {
            const PipelineResult r = run_centralized(complex, pc);
            row.card_P = static_cast<Index>(r.generators.P.size());
            iterations = r.iterations_per_harmonic;
        } else {
            const netsim::DistributedResult r = netsim::run_full_pipeline(complex, pc, netsim::SimConfig{});
            row.card_P = static_cast<Index>(r.generators.P.size());
            row.messages_total = r.cost.total_broadcasts();
            iterations = r.iterations_per_harmonic;
        }
        std::int64_t total = 0;
        for (const auto it : iterations) total += it;
        row.iterations = total;
    } catch (const std::exception& e) {
        row.error = csv_field(e.what());
    }
    return row;
}

std::vector<ExcessRow> excess_cycles(const ExcessConfig& config, const std::function<void(const ExcessRow&)>& emit) {
    const std::vector<int> sizes = config.n.values();
    const auto trials = static_cast<std::size_t>(std::max(config.trials, 0));
    return run_trials<ExcessRow>(
        sizes.size() * trials, config.jobs,
        [&](std::size_t i) {
            const int n = sizes[i / trials];
            const int t = static_cast<int>(i % trials);
            return excess_trial(config, n, trial_seed(config.seed_base, n, t));
        },
        emit);
}

void write_row(std::ostream& out, const ExcessRow& row) {
    out << row.n << ',' << row.seed << ',';
    put(out, row.b1);
    out << ',';
    put(out, row.card_P);
    out << ',';
    put(out, row.excess());
    out << ',';
    put(out, row.iterations);
    out << ',';
    put(out, row.messages_total);
    out << ',' << csv_field(row.error) << '\n';
}

// ---- iterations versus digits ------------------------------------------

std::vector<DigitsRow> digits_trial(const Laplacian1& laplacian, std::span<const int> digits, std::uint64_t seed) {
    std::vector<DigitsRow> rows(digits.size());
    if (digits.empty()) return rows;
    const Index edges = laplacian.size();
    const int finest = *std::max_element(digits.begin(), digits.end());

    std::vector<ConvergenceMonitor> monitors;
    std::vector<std::optional<std::int64_t>> stopped(digits.size());
    HarmonicConfig config;
    config.epsilon = epsilon_for(finest);
    config.seed = seed;
    std::string failure;
    try {
        const double delta = compute_delta(laplacian);
        config.delta = delta;
        for (const int d : digits) monitors.emplace_back(epsilon_for(d), delta);

        Eigen::VectorXd previous = initial_vector(edges, seed);
        iterate_harmonic(laplacian, config, [&](std::int64_t k, const Eigen::VectorXd& y) {
            // Same norm, same order of operations as the iteration itself.
            double update = 0.0;
            for (Index i = 0; i < edges; ++i) update = max_keep_nan(update, std::abs(y[i] - previous[i]));
            previous = y;
            for (std::size_t j = 0; j < monitors.size(); ++j)
                if (!stopped[j] && monitors[j].observe(k, update)) stopped[j] = k;
        });
    } catch (const std::exception& e) {
        failure = csv_field(e.what());
    }

    for (std::size_t j = 0; j < digits.size(); ++j) {
        DigitsRow& row = rows[j];
        row.seed = seed;
        row.digits = digits[j];
        const std::int64_t cap = default_max_iterations(edges, epsilon_for(digits[j]));
        if (stopped[j] && *stopped[j] <= cap)
            row.iterations = stopped[j];
        else if (stopped[j])
            row.error = "harmonic iteration hit the cap of " + std::to_string(cap) + " iterations";
        else
            row.error = failure.empty() ? "stopping rule never accepted" : failure;
    }
    return rows;
}

std::vector<DigitsRow> iterations_vs_digits(const DigitsConfig& config,
                                            const std::function<void(const DigitsRow&)>& emit) {
    const std::vector<int> digits = config.digits.values();
    const SimplicialComplex2 complex = geom::generate({config.n, config.avg_degree, config.graph_seed});
    const Laplacian1 laplacian = build_laplacian_combinatorial(complex);
    const auto trials = static_cast<std::size_t>(std::max(config.trials, 0));

    std::vector<std::vector<DigitsRow>> per_trial = run_trials<std::vector<DigitsRow>>(
        trials, config.jobs,
        [&](std::size_t t) {
            std::vector<DigitsRow> rows = digits_trial(laplacian, digits, trial_seed(config.seed_base, t));
            for (DigitsRow& r : rows) r.n = config.n;
            return rows;
        },
        [&](const std::vector<DigitsRow>& rows) {
            if (emit)
                for (const DigitsRow& r : rows) emit(r);
        });
    std::vector<DigitsRow> out;
    for (auto& rows : per_trial) out.insert(out.end(), rows.begin(), rows.end());
    return out;
}

void write_row(std::ostream& out, const DigitsRow& row) {
    out << row.n << ',' << row.seed << ',' << row.digits << ',';
    put(out, row.iterations);
    out << ',' << csv_field(row.error) << '\n';
}

// ---- iterations versus n -----------------------------------------------

std::vector<SizeRow> iterations_vs_n(const SizeConfig& config, const std::function<void(const SizeRow&)>& emit) {
    const std::vector<int> sizes = config.n.values();
    const auto trials = static_cast<std::size_t>(std::max(config.trials, 0));
    return run_trials<SizeRow>(
        sizes.size() * trials, config.jobs,
        [&](std::size_t i) {
            SizeRow row;
            row.n = sizes[i / trials];
            row.seed = trial_seed(config.seed_base, row.n, static_cast<int>(i % trials));
            try {
                const SimplicialComplex2 complex = geom::generate({row.n, config.avg_degree, row.seed});
                row.nodes = complex.vertex_count();
                row.edges = complex.edge_count();
                HarmonicConfig hc;
                hc.epsilon = config.epsilon;
                hc.seed = row.seed;
                const HarmonicResult r = iterate_harmonic(build_laplacian_combinatorial(complex), hc);
                row.delta = r.delta_used;
                row.iterations = r.iterations;
            } catch (const std::exception& e) {
                row.error = csv_field(e.what());
            }
            return row;
        },
        emit);
}

void write_row(std::ostream& out, const SizeRow& row) {
    out << row.n << ',' << row.seed << ',';
    put(out, row.nodes);
    out << ',';
    put(out, row.edges);
    out << ',';
    put(out, row.delta);
    out << ',';
    put(out, row.iterations);
    out << ',' << csv_field(row.error) << '\n';
}

}  // namespace hodge::experiments
