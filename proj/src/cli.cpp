#include "qcs/cli.hpp"

#include "qcs/error.hpp"
#include "qcs/experiments.hpp"
#include "qcs/random.hpp"
#include "qcs/recovery.hpp"
#include "qcs/selftest.hpp"
#include "qcs/sensing.hpp"

#include <CLI11.hpp>

#include <functional>
#include <memory>
#include <ostream>

namespace qcs {

namespace {

struct GenMatrixArgs {
    std::size_t m = 0;
    std::size_t n = 0;
    std::uint64_t seed = 1;
    std::string kind = "gaussian";
    std::string out;
};

struct GenSignalArgs {
    std::size_t n = 0;
    std::size_t s = 0;
    std::uint64_t seed = 1;
    std::string out;
    std::string matrix;
    std::string obs_out;
    double noise = 0.0;
};

struct RecoverArgs {
    std::string matrix;
    std::string obs;
    double eta = 0.0;
    std::string out;
    std::string truth;
    int max_iters = socp::SolverSettings{}.max_iters;
    double tol = socp::SolverSettings{}.tol_gap;
};

struct RipArgs {
    std::string matrix;
    std::size_t s = 2;
    bool exact = false;
    bool lower_bound = false;
    bool coherence = false;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    std::uint64_t cap = default_support_cap;
};

struct PhaseArgs {
    std::size_t n = 128;
    std::vector<std::size_t> m{8, 16, 24, 32, 40, 48, 56, 64};
    std::size_t s_min = 1;
    std::size_t s_max = 16;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    double eta = 0.0;
    double threshold = perfect_recovery_threshold;
    std::string kind = "gaussian";
    bool reuse_matrix = false;
    std::size_t threads = 1;
    bool timing = false;
    std::string out;
    std::string rates_out;
};

struct C0Args {
    std::size_t n = 256;
    std::size_t m = 32;
    std::uint64_t seed = 1;
    std::size_t s_min = 1;
    std::size_t s_max = 0;
    std::string out;
};

socp::SolverSettings solver_settings(int max_iters, double tol)
{
    if (max_iters < 1 || !(tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "--max-iters must be >= 1 and --tol > 0");
    }
    socp::SolverSettings st;
    st.max_iters = max_iters;
    st.tol_gap = st.tol_primal = st.tol_dual = tol;
    return st;
}

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::IoError:
    case ErrorCode::ParseError: return exit_io;
    case ErrorCode::RankDeficient:
    case ErrorCode::InfeasibleProblem:
    case ErrorCode::DegenerateDenominator: return exit_numerical;
    default: return exit_usage;
    }
}

int gen_matrix(const GenMatrixArgs& a, std::ostream& err)
{
    const MatrixKind kind = parse_matrix_kind(a.kind);
    err << "gen-matrix: m=" << a.m << " n=" << a.n << " seed=" << a.seed
        << " kind=" << to_string(kind) << " out=" << a.out << '\n';
    write_matrix_file(a.out, make_matrix(kind, a.m, a.n, a.seed));
    return exit_ok;
}

int gen_signal(const GenSignalArgs& a, std::ostream& err)
{
    const std::uint64_t noise_seed = substream_seed(a.seed, 2);
    err << "gen-signal: n=" << a.n << " s=" << a.s << " seed=" << a.seed << " out=" << a.out;
    if (!a.matrix.empty()) {
        err << " matrix=" << a.matrix << " obs-out=" << a.obs_out << " noise=" << format_real(a.noise)
            << " noise-seed=" << noise_seed;
    }
    err << '\n';
    if (a.matrix.empty() != a.obs_out.empty()) {
        throw Error(ErrorCode::InvalidArgument, "--matrix and --obs-out must be given together");
    }
    const QVector x = sparse_signal(a.n, a.s, a.seed);
    if (!a.matrix.empty()) {
        const RealMatrix phi = read_matrix_file(a.matrix);
        QVector y = apply(phi, x);
        if (a.noise > 0.0) y = y + noise_vector(y.size(), a.noise, noise_seed);
        else if (!(a.noise >= 0.0)) throw Error(ErrorCode::NegativeEta, "--noise must be >= 0");
        write_signal_file(a.obs_out, y);
    }
    write_signal_file(a.out, x);
    return exit_ok;
}

int recover_cmd(const RecoverArgs& a, std::ostream& err)
{
    err << "recover: matrix=" << a.matrix << " obs=" << a.obs << " eta=" << format_real(a.eta)
        << " out=" << a.out << " max-iters=" << a.max_iters << " tol=" << format_real(a.tol);
    if (!a.truth.empty()) err << " truth=" << a.truth;
    err << '\n';
    const auto settings = solver_settings(a.max_iters, a.tol);
    const RealMatrix phi = read_matrix_file(a.matrix);
    const QVector y = read_signal_file(a.obs);
    RecoveryResult res = recover(phi, y, a.eta, settings);
    err << "status=" << socp::to_string(res.solver.status) << " iters=" << res.solver.iters
        << " l1=" << format_real(res.l1_objective) << " misfit=" << format_real(res.misfit) << '\n';
    if (res.solver.status != socp::Status::Optimal) {
        err << "error: solver did not reach an optimal point\n";
        return exit_numerical;
    }
    if (!a.truth.empty()) {
        attach_truth(res, read_signal_file(a.truth));
        err << "error_l2=" << format_real(*res.error_l2) << " error_l1=" << format_real(*res.error_l1)
            << '\n';
    }
    write_signal_file(a.out, res.x_hat);
    return exit_ok;
}

int rip_cmd(const RipArgs& a, std::ostream& out, std::ostream& err)
{
    const char* method = a.coherence ? "coherence" : (a.lower_bound ? "lower-bound" : "exact");
    err << "rip: matrix=" << a.matrix << " s=" << a.s << " method=" << method;
    if (a.lower_bound) err << " trials=" << a.trials << " seed=" << a.seed;
    if (!a.lower_bound && !a.coherence) err << " cap=" << a.cap;
    err << '\n';
    const RealMatrix phi = read_matrix_file(a.matrix);
    if (a.coherence) {
        out << "coherence=" << format_real(coherence(phi)) << '\n';
        return exit_ok;
    }
    const RipEstimate est = a.lower_bound ? rip_constant_lower_bound(phi, a.s, a.trials, a.seed)
                                          : rip_constant_exact(phi, a.s, a.cap);
    out << "delta_s=" << format_real(est.value) << '\n';
    return exit_ok;
}

std::vector<std::size_t> s_range(std::size_t lo, std::size_t hi)
{
    if (lo < 1 || hi < lo) throw Error(ErrorCode::SOutOfRange, "need 1 <= s-min <= s-max");
    std::vector<std::size_t> v;
    for (std::size_t s = lo; s <= hi; ++s) v.push_back(s);
    return v;
}

int phase_cmd(const PhaseArgs& a, std::ostream& err)
{
    ExperimentConfig cfg;
    cfg.n = a.n;
    cfg.m_values = a.m;
    cfg.s_values = s_range(a.s_min, a.s_max);
    cfg.trials = a.trials;
    cfg.base_seed = a.seed;
    cfg.eta = a.eta;
    cfg.perfect_threshold = a.threshold;
    cfg.matrix_kind = parse_matrix_kind(a.kind);
    cfg.reuse_matrix = a.reuse_matrix;
    cfg.threads = a.threads;
    cfg.record_timing = a.timing;
    cfg.output_path = a.out;
    const std::string rates_out = a.rates_out.empty() ? a.out + ".rates.csv" : a.rates_out;
    err << "phase: " << cfg.echo() << " threads=" << cfg.threads << " out=" << a.out
        << " rates-out=" << rates_out << '\n';
    err << "phase: trial seeds derive_trial_seed(" << cfg.base_seed << ", m, s, trial)\n";
    cfg.validate();

    std::size_t last_decile = 0;
    const ExperimentGrid grid = run_phase_transition(cfg, [&](std::size_t done, std::size_t total) {
        const std::size_t decile = done * 10 / total;
        if (decile > last_decile) {
            last_decile = decile;
            err << "phase: " << done << "/" << total << " trials\n";
        }
    });
    write_results(grid, a.out);
    write_rates(grid, rates_out);
    for (const auto& c : grid.rates) {
        err << "m=" << c.m << " s=" << c.s << " rate=" << format_real(c.rate()) << '\n';
    }
    return exit_ok;
}

int c0_cmd(const C0Args& a, std::ostream& err)
{
    const std::size_t s_max = a.s_max == 0 ? a.n / 2 : a.s_max;
    err << "c0: n=" << a.n << " m=" << a.m << " seed=" << a.seed << " s=" << a.s_min << ".." << s_max
        << " matrix-seed=" << substream_seed(a.seed, 0) << " signal-seed=" << substream_seed(a.seed, 1)
        << " out=" << a.out << '\n';
    const C0Table table = run_c0_experiment(a.n, a.m, a.seed, s_range(a.s_min, s_max));
    err << "c0: status=" << table.solver_status << " iters=" << table.solver_iters << '\n';
    write_results(table, a.out);
    if (table.solver_status != socp::to_string(socp::Status::Optimal)) {
        err << "error: solver did not reach an optimal point\n";
        return exit_numerical;
    }
    return exit_ok;
}

struct CliState {
    GenMatrixArgs gen_matrix;
    GenSignalArgs gen_signal;
    RecoverArgs recover;
    RipArgs rip;
    PhaseArgs phase;
    C0Args c0;
    std::function<int(std::ostream&, std::ostream&)> run;
};

std::unique_ptr<CLI::App> build_app(CliState& st)
{
    auto app = std::make_unique<CLI::App>("Sparse quaternion signal recovery by l1 minimization",
                                          "qcs");
    app->require_subcommand(1);
    app->option_defaults()->always_capture_default();
    app->allow_extras(false);

    auto* gm = &st.gen_matrix;
    auto* gs = &st.gen_signal;
    auto* rc = &st.recover;
    auto* rp = &st.rip;
    auto* ph = &st.phase;
    auto* c0 = &st.c0;

    auto* cmd = app->add_subcommand("gen-matrix", "Write a random measurement matrix (QCSMAT)");
    cmd->add_option("--m", gm->m, "Rows")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--n", gm->n, "Columns")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--seed", gm->seed, "PRNG seed");
    cmd->add_option("--kind", gm->kind, "gaussian | partial-orthogonal");
    cmd->add_option("--out", gm->out, "Output matrix file")->required();
    cmd->callback([&st, gm] { st.run = [gm](std::ostream&, std::ostream& e) { return gen_matrix(*gm, e); }; });

    cmd = app->add_subcommand("gen-signal", "Write a random s-sparse quaternion signal (QCSSIG)");
    cmd->add_option("--n", gs->n, "Signal length")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--s", gs->s, "Sparsity, 1 <= s <= n/2")->required();
    cmd->add_option("--seed", gs->seed, "PRNG seed");
    cmd->add_option("--out", gs->out, "Output signal file")->required();
    cmd->add_option("--matrix", gs->matrix, "Matrix file; also writes observations Phi x + e (default: none)");
    cmd->add_option("--obs-out", gs->obs_out, "Observation output file, required with --matrix (default: none)");
    cmd->add_option("--noise", gs->noise, "Noise norm |e|_2 added to the observations");
    cmd->callback([&st, gs] { st.run = [gs](std::ostream&, std::ostream& e) { return gen_signal(*gs, e); }; });

    cmd = app->add_subcommand("recover", "Recover a signal by l1 minimization");
    cmd->add_option("--matrix", rc->matrix, "Matrix file")->required();
    cmd->add_option("--obs", rc->obs, "Observation file")->required();
    cmd->add_option("--eta", rc->eta, "Noise radius; 0 gives equality constraints");
    cmd->add_option("--out", rc->out, "Output signal file")->required();
    cmd->add_option("--truth", rc->truth, "Reference signal; reports the recovery error (default: none)");
    cmd->add_option("--max-iters", rc->max_iters, "Interior-point iteration limit");
    cmd->add_option("--tol", rc->tol, "Primal, dual and gap tolerance");
    cmd->callback([&st, rc] { st.run = [rc](std::ostream&, std::ostream& e) { return recover_cmd(*rc, e); }; });

    cmd = app->add_subcommand("rip", "Estimate the restricted isometry constant delta_s");
    cmd->add_option("--matrix", rp->matrix, "Matrix file")->required();
    cmd->add_option("--s", rp->s, "Sparsity level (ignored by --coherence)");
    auto* ex = cmd->add_flag("--exact", rp->exact, "Brute force over all supports (default method when no method flag is given)");
    auto* lb = cmd->add_flag("--lower-bound", rp->lower_bound, "Randomized lower bound (default: off)");
    auto* co = cmd->add_flag("--coherence", rp->coherence, "Mutual coherence of the columns (default: off)");
    ex->excludes(lb)->excludes(co);
    lb->excludes(co);
    cmd->add_option("--trials", rp->trials, "Random vectors for --lower-bound")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", rp->seed, "PRNG seed for --lower-bound");
    cmd->add_option("--cap", rp->cap, "Support enumeration cap for --exact");
    cmd->callback([&st, rp] { st.run = [rp](std::ostream& o, std::ostream& e) { return rip_cmd(*rp, o, e); }; });

    cmd = app->add_subcommand("phase", "Phase-transition experiment over an (m, s) grid");
    cmd->add_option("--n", ph->n, "Signal length");
    cmd->add_option("--m", ph->m, "Measurement counts, comma separated")->delimiter(',');
    cmd->add_option("--s-min", ph->s_min, "Smallest sparsity");
    cmd->add_option("--s-max", ph->s_max, "Largest sparsity");
    cmd->add_option("--trials", ph->trials, "Trials per (m, s) cell");
    cmd->add_option("--seed", ph->seed, "Base seed");
    cmd->add_option("--eta", ph->eta, "Noise radius used by the recovery");
    cmd->add_option("--threshold", ph->threshold, "Perfect-recovery threshold on |x# - x|_2");
    cmd->add_option("--kind", ph->kind, "gaussian | partial-orthogonal");
    cmd->add_flag("--reuse-matrix", ph->reuse_matrix, "Share one matrix per m across trials (default: off)");
    cmd->add_option("--threads", ph->threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("--timing", ph->timing, "Record wall time per trial (default: off, column holds 0)");
    cmd->add_option("--out", ph->out, "Per-trial CSV")->required();
    cmd->add_option("--rates-out", ph->rates_out, "Rates CSV (default: <out>.rates.csv)");
    cmd->callback([&st, ph] { st.run = [ph](std::ostream&, std::ostream& e) { return phase_cmd(*ph, e); }; });

    cmd = app->add_subcommand("c0", "Empirical lower bound on the constant C0");
    cmd->add_option("--n", c0->n, "Signal length");
    cmd->add_option("--m", c0->m, "Measurements");
    cmd->add_option("--seed", c0->seed, "Seed");
    cmd->add_option("--s-min", c0->s_min, "Smallest s");
    cmd->add_option("--s-max", c0->s_max, "Largest s (0: n/2)");
    cmd->add_option("--out", c0->out, "Output CSV")->required();
    cmd->callback([&st, c0] { st.run = [c0](std::ostream&, std::ostream& e) { return c0_cmd(*c0, e); }; });

    cmd = app->add_subcommand("selftest", "Run the built-in consistency checks");
    cmd->callback([&st] {
        st.run = [](std::ostream&, std::ostream& e) { return run_selftest(e); };
    });

    for (auto* sub : app->get_subcommands({})) sub->allow_extras(false);
    return app;
}

} // namespace

std::vector<std::string> cli_subcommands()
{
    return {"gen-matrix", "gen-signal", "recover", "rip", "phase", "c0", "selftest"};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CliState st;
    auto app = build_app(st);

    std::vector<std::string> argv_store{"qcs"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());

    try {
        app->parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app->exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app->exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app->exit(e, out, err);
        return exit_usage;
    }

    try {
        return st.run(out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_numerical;
    }
}

} // namespace qcs
