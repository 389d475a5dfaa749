#pragma once

#include "qcs/quat.hpp"
#include "qcs/recovery.hpp"
#include "qcs/sensing.hpp"
#include "qcs/socp.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace qcs {

inline constexpr const char* artifact_version = "1.0.0";

/// splitmix64 finalizer of base_seed + 0x9E3779B97F4A7C15 * (packed + 1), where
/// packed = m << 48 | s << 32 | trial. Injective for m, s < 2^16 and trial < 2^32
/// (InvalidArgument outside those ranges).
std::uint64_t derive_trial_seed(std::uint64_t base_seed, std::uint64_t m, std::uint64_t s,
                                std::uint64_t trial);

/// s-sparse quaternion signal: support is the prefix of a Fisher-Yates shuffle,
/// each nonzero has four i.i.d. N(0, 1) components. Requires 1 <= s <= n/2.
QVector sparse_signal(std::size_t n, std::size_t s, std::uint64_t seed);

/// Dense signal with all 4n components i.i.d. N(0, 1).
QVector dense_signal(std::size_t n, std::uint64_t seed);

/// Quaternion vector of length m scaled to ‖e‖_2 = norm.
QVector noise_vector(std::size_t m, double norm, std::uint64_t seed);

struct ExperimentConfig {
    std::size_t n = 128;
    std::vector<std::size_t> m_values{8, 16, 24, 32, 40, 48, 56, 64};
    std::vector<std::size_t> s_values{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
    std::size_t trials = 100;
    std::uint64_t base_seed = 1;
    double eta = 0.0;
    double perfect_threshold = perfect_recovery_threshold;
    MatrixKind matrix_kind = MatrixKind::Gaussian;
    /// One matrix per m shared by all trials instead of a fresh draw per trial.
    bool reuse_matrix = false;
    /// Worker threads; output does not depend on it.
    std::size_t threads = 1;
    /// Store measured wall time per trial; when off the column holds 0 so
    /// files stay byte-reproducible.
    bool record_timing = false;
    std::string output_path;
    socp::SolverSettings solver;

    /// Throws on s outside [1, n/2], m outside [1, n], trials == 0 or eta < 0.
    void validate() const;
    /// One-line description used in file headers (excludes threads and paths).
    std::string echo() const;
};

struct TrialRecord {
    std::size_t m = 0;
    std::size_t s = 0;
    std::size_t trial_index = 0;
    std::uint64_t seed = 0;
    double error_l2 = 0.0;
    double error_l1 = 0.0;
    bool perfect = false;
    int solver_iters = 0;
    std::string solver_status;
    long long wall_millis = 0;
};

struct RateCell {
    std::size_t m = 0;
    std::size_t s = 0;
    std::size_t perfect = 0;
    std::size_t trials = 0;
    double rate() const { return trials ? static_cast<double>(perfect) / static_cast<double>(trials) : 0.0; }
};

struct ExperimentGrid {
    ExperimentConfig config;
    std::vector<TrialRecord> records;
    std::vector<RateCell> rates;

    const RateCell* cell(std::size_t m, std::size_t s) const;
};

/// One recovery trial of the phase-transition experiment.
TrialRecord run_trial(const ExperimentConfig& config, std::size_t m, std::size_t s,
                      std::size_t trial);

/// Per-(m, s) perfect counts in first-appearance order of the records.
std::vector<RateCell> aggregate_rates(const std::vector<TrialRecord>& records);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Every (m, s, trial) of the grid; records ordered m, then s, then trial.
ExperimentGrid run_phase_transition(const ExperimentConfig& config, const ProgressFn& progress = {});

struct C0Row {
    std::size_t s = 0;
    double ratio_l1 = 0.0;
    double ratio_l2 = 0.0;
    bool skipped = false;
};

struct C0Table {
    std::size_t n = 0;
    std::size_t m = 0;
    std::uint64_t seed = 0;
    std::string solver_status;
    int solver_iters = 0;
    std::vector<C0Row> rows;
};

/// One Gaussian matrix, one dense signal, one noiseless recovery, then the
/// lower-bound ratios for each s (DegenerateDenominator rows are skipped).
C0Table run_c0_experiment(std::size_t n, std::size_t m, std::uint64_t seed,
                          const std::vector<std::size_t>& s_values,
                          const socp::SolverSettings& settings = {});

/// A partial-orthogonal matrix whose exact delta_2 is below 1/3.
struct CertifiedMatrix {
    RealMatrix phi;
    double delta_2 = 0.0;
    std::uint64_t seed = 0;
};

struct CertifiedDraws {
    std::vector<CertifiedMatrix> accepted;
    std::size_t rejected = 0;
};

/// Draws partial-orthogonal m x n matrices from consecutive seeds until `count`
/// pass the brute-force delta_2 < 1/3 check or `max_draws` are used.
CertifiedDraws certified_partial_orthogonal(std::size_t m, std::size_t n, std::size_t count,
                                            std::uint64_t base_seed, std::size_t max_draws);

/// CSV writers. Each file starts with a `#` comment echoing the configuration.
void write_results(std::ostream& os, const ExperimentGrid& grid);
void write_rates(std::ostream& os, const ExperimentGrid& grid);
void write_results(std::ostream& os, const C0Table& table);
void write_results(const ExperimentGrid& grid, const std::string& path);
void write_rates(const ExperimentGrid& grid, const std::string& path);
void write_results(const C0Table& table, const std::string& path);

/// Reads records back from a "phase" CSV.
std::vector<TrialRecord> read_phase_records(std::istream& is);
std::vector<TrialRecord> read_phase_records(const std::string& path);

} // namespace qcs
