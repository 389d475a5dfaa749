#include "qcs/experiments.hpp"

#include "qcs/error.hpp"
#include "qcs/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace qcs {

namespace {

constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;
constexpr const char* phase_header = "m,s,trial,seed,error_l2,error_l1,perfect,iters,status,wall_millis";
constexpr const char* rates_header = "m,s,rate";
constexpr const char* c0_header = "s,ratio_l1,ratio_l2,skipped";

std::string join(const std::vector<std::size_t>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(values[i]);
    }
    return out;
}

std::vector<std::size_t> fisher_yates_prefix(std::size_t n, std::size_t k, Rng& rng)
{
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

Quaternion normal_quaternion(Rng& rng)
{
    const double a = rng.normal();
    const double b = rng.normal();
    const double c = rng.normal();
    const double d = rng.normal();
    return {a, b, c, d};
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    }
    return out;
}

void finish(std::ofstream& out, const std::string& path)
{
    out.flush();
    if (!out) {
        throw Error(ErrorCode::IoError, "write failed: " + path);
    }
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& text)
{
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0') {
        throw Error(ErrorCode::ParseError, "bad real '" + text + "'");
    }
    return v;
}

unsigned long long parse_unsigned(const std::string& text)
{
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (text.empty() || *end != '\0' || text[0] == '-') {
        throw Error(ErrorCode::ParseError, "bad integer '" + text + "'");
    }
    return v;
}

} // namespace

std::uint64_t derive_trial_seed(std::uint64_t base_seed, std::uint64_t m, std::uint64_t s,
                                std::uint64_t trial)
{
    if (m >= (1ULL << 16) || s >= (1ULL << 16) || trial >= (1ULL << 32)) {
        throw Error(ErrorCode::InvalidArgument, "trial index out of packing range");
    }
    const std::uint64_t packed = (m << 48) | (s << 32) | trial;
    return splitmix64_mix(base_seed + golden_gamma * (packed + 1));
}

QVector sparse_signal(std::size_t n, std::size_t s, std::uint64_t seed)
{
    if (s < 1 || s > n / 2) {
        throw Error(ErrorCode::SOutOfRange,
                    "s = " + std::to_string(s) + " outside [1, n/2] for n = " + std::to_string(n));
    }
    Rng rng(seed);
    const auto supp = fisher_yates_prefix(n, s, rng);
    QVector x(n);
    for (std::size_t idx : supp) {
        Quaternion q = normal_quaternion(rng);
        // a draw of exactly zero would shrink the support
        while (q.is_zero()) q = normal_quaternion(rng);
        x[idx] = q;
    }
    return x;
}

QVector dense_signal(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    QVector x(n);
    for (auto& q : x) q = normal_quaternion(rng);
    return x;
}

QVector noise_vector(std::size_t m, double norm, std::uint64_t seed)
{
    if (!(norm >= 0.0)) {
        throw Error(ErrorCode::NegativeEta, "noise norm must be nonnegative");
    }
    QVector e = dense_signal(m, seed);
    const double len = lp_norm(e, Norm::L2);
    if (norm == 0.0 || len == 0.0) return QVector(m);
    return (norm / len) * e;
}

void ExperimentConfig::validate() const
{
    if (n < 2) throw Error(ErrorCode::InvalidDims, "n must be at least 2");
    if (m_values.empty() || s_values.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty m or s list");
    }
    for (auto m : m_values) {
        if (m < 1 || m > n) {
            throw Error(ErrorCode::InvalidDims, "m = " + std::to_string(m) + " outside [1, n]");
        }
    }
    for (auto s : s_values) {
        if (s < 1 || s > n / 2) {
            throw Error(ErrorCode::SOutOfRange, "s = " + std::to_string(s) + " outside [1, n/2]");
        }
    }
    if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be positive");
    if (!(eta >= 0.0)) throw Error(ErrorCode::NegativeEta, "eta must be nonnegative");
    if (!(perfect_threshold >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "threshold must be nonnegative");
    }
}

std::string ExperimentConfig::echo() const
{
    std::ostringstream os;
    os << "n=" << n << " m=" << join(m_values) << " s=" << join(s_values) << " trials=" << trials
       << " seed=" << base_seed << " eta=" << format_real(eta)
       << " threshold=" << format_real(perfect_threshold) << " kind=" << to_string(matrix_kind)
       << " matrix=" << (reuse_matrix ? "reused-per-m" : "fresh-per-trial")
       << " signal=iid-normal-components timing=" << (record_timing ? "on" : "off");
    return os.str();
}

const RateCell* ExperimentGrid::cell(std::size_t m, std::size_t s) const
{
    for (const auto& c : rates) {
        if (c.m == m && c.s == s) return &c;
    }
    return nullptr;
}

TrialRecord run_trial(const ExperimentConfig& config, std::size_t m, std::size_t s,
                      std::size_t trial)
{
    TrialRecord rec;
    rec.m = m;
    rec.s = s;
    rec.trial_index = trial;
    rec.seed = derive_trial_seed(config.base_seed, m, s, trial);

    const auto start = std::chrono::steady_clock::now();
    try {
        // s = 0 never occurs in a grid, so (m, 0, 0) is free for the shared matrix
        const std::uint64_t matrix_seed = config.reuse_matrix
                                              ? derive_trial_seed(config.base_seed, m, 0, 0)
                                              : substream_seed(rec.seed, 0);
        const RealMatrix phi = make_matrix(config.matrix_kind, m, config.n, matrix_seed);
        const QVector x = sparse_signal(config.n, s, substream_seed(rec.seed, 1));
        const QVector y = apply(phi, x);
        RecoveryResult res = recover(phi, y, config.eta, config.solver);
        attach_truth(res, x);
        rec.error_l2 = *res.error_l2;
        rec.error_l1 = *res.error_l1;
        rec.solver_iters = res.solver.iters;
        rec.solver_status = std::string(socp::to_string(res.solver.status));
    } catch (const Error& e) {
        rec.error_l2 = std::numeric_limits<double>::quiet_NaN();
        rec.error_l1 = std::numeric_limits<double>::quiet_NaN();
        rec.solver_status = std::string(to_string(e.code()));
    }
    rec.perfect = rec.error_l2 <= config.perfect_threshold;
    if (config.record_timing) {
        rec.wall_millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - start)
                              .count();
    }
    return rec;
}

std::vector<RateCell> aggregate_rates(const std::vector<TrialRecord>& records)
{
    std::vector<RateCell> cells;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> where;
    for (const auto& r : records) {
        auto [it, fresh] = where.try_emplace({r.m, r.s}, cells.size());
        if (fresh) cells.push_back({r.m, r.s, 0, 0});
        RateCell& c = cells[it->second];
        ++c.trials;
        if (r.perfect) ++c.perfect;
    }
    return cells;
}

ExperimentGrid run_phase_transition(const ExperimentConfig& config, const ProgressFn& progress)
{
    config.validate();
    struct Job {
        std::size_t m, s, trial;
    };
    std::vector<Job> jobs;
    for (auto m : config.m_values) {
        for (auto s : config.s_values) {
            for (std::size_t t = 0; t < config.trials; ++t) jobs.push_back({m, s, t});
        }
    }

    ExperimentGrid grid;
    grid.config = config;
    grid.records.resize(jobs.size());

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex mu;
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            try {
                grid.records[k] = run_trial(config, jobs[k].m, jobs[k].s, jobs[k].trial);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                next = jobs.size();
                return;
            }
            const std::size_t finished = done.fetch_add(1) + 1;
            if (progress) {
                std::lock_guard lock(mu);
                progress(finished, jobs.size());
            }
        }
    };

    const std::size_t nthreads = std::max<std::size_t>(1, std::min(config.threads, jobs.size()));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    grid.rates = aggregate_rates(grid.records);
    return grid;
}

C0Table run_c0_experiment(std::size_t n, std::size_t m, std::uint64_t seed,
                          const std::vector<std::size_t>& s_values,
                          const socp::SolverSettings& settings)
{
    for (auto s : s_values) {
        if (s < 1 || s > n / 2) {
            throw Error(ErrorCode::SOutOfRange, "s = " + std::to_string(s) + " outside [1, n/2]");
        }
    }
    if (m < 1 || m > n) throw Error(ErrorCode::InvalidDims, "m outside [1, n]");

    const RealMatrix phi = gaussian_matrix(m, n, substream_seed(seed, 0));
    const QVector x = dense_signal(n, substream_seed(seed, 1));
    const RecoveryResult res = recover(phi, apply(phi, x), 0.0, settings);

    C0Table table;
    table.n = n;
    table.m = m;
    table.seed = seed;
    table.solver_status = std::string(socp::to_string(res.solver.status));
    table.solver_iters = res.solver.iters;
    for (auto s : s_values) {
        C0Row row;
        row.s = s;
        try {
            const C0Ratios r = c0_ratios(x, res.x_hat, s);
            row.ratio_l1 = r.ratio_l1;
            row.ratio_l2 = r.ratio_l2;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateDenominator) throw;
            row.skipped = true;
            row.ratio_l1 = std::numeric_limits<double>::quiet_NaN();
            row.ratio_l2 = std::numeric_limits<double>::quiet_NaN();
        }
        table.rows.push_back(row);
    }
    return table;
}

CertifiedDraws certified_partial_orthogonal(std::size_t m, std::size_t n, std::size_t count,
                                            std::uint64_t base_seed, std::size_t max_draws)
{
    CertifiedDraws out;
    for (std::size_t k = 0; k < max_draws && out.accepted.size() < count; ++k) {
        const std::uint64_t seed = substream_seed(base_seed, k);
        RealMatrix phi = partial_orthogonal_matrix(m, n, seed);
        const double delta = rip_constant_exact(phi, 2).value;
        if (delta < 1.0 / 3.0) {
            out.accepted.push_back({std::move(phi), delta, seed});
        } else {
            ++out.rejected;
        }
    }
    return out;
}

void write_results(std::ostream& os, const ExperimentGrid& grid)
{
    os << "# qcs " << artifact_version << " phase " << grid.config.echo() << '\n';
    os << phase_header << '\n';
    for (const auto& r : grid.records) {
        os << r.m << ',' << r.s << ',' << r.trial_index << ',' << r.seed << ','
           << format_real(r.error_l2) << ',' << format_real(r.error_l1) << ','
           << (r.perfect ? 1 : 0) << ',' << r.solver_iters << ',' << r.solver_status << ','
           << r.wall_millis << '\n';
    }
}

void write_rates(std::ostream& os, const ExperimentGrid& grid)
{
    os << "# qcs " << artifact_version << " rates " << grid.config.echo() << '\n';
    os << rates_header << '\n';
    for (const auto& c : grid.rates) {
        os << c.m << ',' << c.s << ',' << format_real(c.rate()) << '\n';
    }
}

void write_results(std::ostream& os, const C0Table& table)
{
    os << "# qcs " << artifact_version << " c0 n=" << table.n << " m=" << table.m
       << " seed=" << table.seed << " kind=gaussian signal=dense-iid-normal-components eta=0"
       << " status=" << table.solver_status << " iters=" << table.solver_iters << '\n';
    os << c0_header << '\n';
    for (const auto& r : table.rows) {
        os << r.s << ',' << format_real(r.ratio_l1) << ',' << format_real(r.ratio_l2) << ','
           << (r.skipped ? 1 : 0) << '\n';
    }
}

void write_results(const ExperimentGrid& grid, const std::string& path)
{
    auto out = open_out(path);
    write_results(out, grid);
    finish(out, path);
}

void write_rates(const ExperimentGrid& grid, const std::string& path)
{
    auto out = open_out(path);
    write_rates(out, grid);
    finish(out, path);
}

void write_results(const C0Table& table, const std::string& path)
{
    auto out = open_out(path);
    write_results(out, table);
    finish(out, path);
}

std::vector<TrialRecord> read_phase_records(std::istream& is)
{
    std::vector<TrialRecord> records;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != phase_header) {
                throw Error(ErrorCode::ParseError, "unexpected header '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 10) {
            throw Error(ErrorCode::ParseError, "expected 10 fields in '" + line + "'");
        }
        TrialRecord r;
        r.m = parse_unsigned(f[0]);
        r.s = parse_unsigned(f[1]);
        r.trial_index = parse_unsigned(f[2]);
        r.seed = parse_unsigned(f[3]);
        r.error_l2 = parse_double(f[4]);
        r.error_l1 = parse_double(f[5]);
        if (f[6] != "0" && f[6] != "1") throw Error(ErrorCode::ParseError, "bad perfect flag");
        r.perfect = f[6] == "1";
        r.solver_iters = static_cast<int>(parse_unsigned(f[7]));
        r.solver_status = f[8];
        r.wall_millis = static_cast<long long>(parse_unsigned(f[9]));
        records.push_back(std::move(r));
    }
    if (!header_seen) throw Error(ErrorCode::ParseError, "missing phase header");
    return records;
}

std::vector<TrialRecord> read_phase_records(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    return read_phase_records(in);
}

} // namespace qcs
