#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hodge/complex.hpp"
#include "hodge/cyclebasis.hpp"

namespace hodge::experiments {

/// Inclusive range a:b:s.
struct IntRange {
    int first = 0;
    int last = 0;
    int step = 1;

    std::vector<int> values() const;
};

/// Parses "a:b:s", "a:b" (step 1) or "a". Throws std::invalid_argument.
IntRange parse_range(const std::string& text);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;  // 1 when y is constant and fitted exactly
};

/// Ordinary least squares. Requires at least two distinct x values.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// derive_seed(seed_base, index).
std::uint64_t trial_seed(std::uint64_t seed_base, std::uint64_t index);

/// Seed of trial t at size n: trial_seed(trial_seed(seed_base, n), t), so
/// changing the range leaves the other points' samples alone. It drives both
/// the geometric sample and the harmonic start vectors.
std::uint64_t trial_seed(std::uint64_t seed_base, int n, int trial);

enum class Mode { Centralized, Distributed };

// ---- excess cycles ------------------------------------------------------

struct ExcessConfig {
    IntRange n{100, 600, 100};
    double avg_degree = 6.0;
    int trials = 20;
    std::uint64_t seed_base = 0;
    Mode mode = Mode::Centralized;
    PipelineConfig pipeline;  // reduce is forced off; only |P| is needed
    unsigned jobs = 1;
};

struct ExcessRow {
    int n = 0;
    std::uint64_t seed = 0;
    std::optional<Index> b1;
    std::optional<Index> card_P;
    std::optional<std::int64_t> iterations;      // summed over the labelling harmonics
    std::optional<std::int64_t> messages_total;  // distributed only, through selection
    std::string error;

    std::optional<Index> excess() const;
};

inline constexpr const char* kExcessHeader = "n,seed,b1,card_P,excess,iterations,messages_total,error";

ExcessRow excess_trial(const ExcessConfig& config, int n, std::uint64_t seed);

/// Rows ordered by (n, trial). Trials may run on `jobs` threads; each row is
/// passed to `emit` once it and every earlier row are done.
std::vector<ExcessRow> excess_cycles(const ExcessConfig& config,
                                     const std::function<void(const ExcessRow&)>& emit = {});

void write_row(std::ostream& out, const ExcessRow& row);

// ---- iterations versus digits ------------------------------------------

struct DigitsConfig {
    Index n = 200;
    double avg_degree = 6.0;
    std::uint64_t graph_seed = 1;
    IntRange digits{2, 8, 1};
    int trials = 100;
    std::uint64_t seed_base = 0;  // harmonic seed of trial t: trial_seed(seed_base, t)
    unsigned jobs = 1;
};

struct DigitsRow {
    Index n = 0;
    std::uint64_t seed = 0;
    int digits = 0;
    std::optional<std::int64_t> iterations;
    std::string error;
};

inline constexpr const char* kDigitsHeader = "n,seed,digits,iterations,error";

/// Iterations the stopping rule needs for each epsilon = 10^-d, from one
/// iteration at the smallest epsilon with one monitor per d fed the same
/// update norms. Equivalent to separate runs: monitors are deterministic in
/// their inputs and a stricter monitor never stops before a looser one. A
/// count past the per-epsilon iteration cap is reported as an error.
/// Rows come back with n unset.
std::vector<DigitsRow> digits_trial(const Laplacian1& laplacian, std::span<const int> digits, std::uint64_t seed);

std::vector<DigitsRow> iterations_vs_digits(const DigitsConfig& config,
                                            const std::function<void(const DigitsRow&)>& emit = {});

void write_row(std::ostream& out, const DigitsRow& row);

// ---- iterations versus n -----------------------------------------------

struct SizeConfig {
    IntRange n{100, 600, 100};
    double avg_degree = 6.0;
    int trials = 10;
    double epsilon = 1e-6;
    std::uint64_t seed_base = 0;
    unsigned jobs = 1;
};

struct SizeRow {
    int n = 0;
    std::uint64_t seed = 0;
    std::optional<Index> nodes;
    std::optional<Index> edges;
    std::optional<double> delta;
    std::optional<std::int64_t> iterations;
    std::string error;
};

inline constexpr const char* kSizeHeader = "n,seed,nodes,edges,delta,iterations,error";

std::vector<SizeRow> iterations_vs_n(const SizeConfig& config, const std::function<void(const SizeRow&)>& emit = {});

void write_row(std::ostream& out, const SizeRow& row);

}  // namespace hodge::experiments
