#include "cli.hpp"

#include "qmud/config.hpp"
#include "qmud/errors.hpp"
#include "qmud/mud.hpp"
#include "qmud/qchannel.hpp"
#include "qmud/qsearch.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace qmud::cli {
namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOptions {
    std::string config_path;
    std::uint64_t seed = kDefaultSeed;
    std::string out_path;
    std::size_t threads = 1;
};

// Effective configuration of one run: config file values overridden by flags.
struct RunContext {
    std::string subcommand;
    GlobalOptions globals;
    FlatConfig config;
    std::vector<std::string> argv;
};

FlatConfig load_config(const GlobalOptions& g)
{
    return g.config_path.empty() ? FlatConfig{} : FlatConfig::load(g.config_path);
}

template <typename T>
void override_if_given(FlatConfig& cfg, const CLI::Option* opt, const std::string& key, const T& value)
{
    if (opt != nullptr && opt->count() > 0) {
        std::ostringstream os;
        os.precision(17);
        os << value;
        cfg.set(key, os.str());
    }
}

void override_list_if_given(FlatConfig& cfg, const CLI::Option* opt, const std::string& key,
                            const std::vector<double>& values)
{
    if (opt != nullptr && opt->count() > 0) {
        std::ostringstream os;
        os.precision(17);
        for (std::size_t i = 0; i < values.size(); ++i) {
            os << (i ? "," : "") << values[i];
        }
        cfg.set(key, os.str());
    }
}

std::uint64_t effective_seed(const RunContext& ctx, const CLI::Option* seed_opt)
{
    // --seed beats a seed key in the config file.
    if (seed_opt != nullptr && seed_opt->count() > 0) {
        ctx.config.get_uint("seed", 0);
        return ctx.globals.seed;
    }
    return ctx.config.get_uint("seed", ctx.globals.seed);
}

void write_manifest(const RunContext& ctx, std::uint64_t seed, std::ostream& os)
{
    nlohmann::ordered_json manifest;
    manifest["tool"] = "qmud";
    manifest["version"] = kVersion;
    manifest["subcommand"] = ctx.subcommand;
    manifest["seed"] = seed;
    manifest["threads"] = ctx.globals.threads;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [key, value] : ctx.config.values()) {
        cfg[key] = value;
    }
    manifest["config"] = cfg;
    manifest["argv"] = ctx.argv;
    os << manifest.dump(2) << '\n';
}

// CSV to --out (plus a .manifest.json sidecar) or to `out`.
void emit(const RunContext& ctx, std::uint64_t seed, const std::string& csv, std::ostream& out)
{
    if (ctx.globals.out_path.empty()) {
        out << csv;
        return;
    }
    std::ofstream file(ctx.globals.out_path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot write '" + ctx.globals.out_path + "'");
    }
    file << csv;
    std::ofstream manifest(ctx.globals.out_path + ".manifest.json", std::ios::binary);
    if (!manifest) {
        throw std::runtime_error("cannot write manifest next to '" + ctx.globals.out_path + "'");
    }
    write_manifest(ctx, seed, manifest);
}

std::vector<std::uint64_t> pick_marked(std::uint64_t n_items, std::uint64_t n_marked, Rng& rng)
{
    std::vector<std::uint64_t> idx(n_items);
    for (std::uint64_t i = 0; i < n_items; ++i) {
        idx[i] = i;
    }
    for (std::uint64_t i = 0; i < n_marked; ++i) {
        std::swap(idx[i], idx[i + uniform_index(rng, n_items - i)]);
    }
    idx.resize(n_marked);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::size_t qubits_for(std::uint64_t n_items)
{
    if (n_items < 2 || !std::has_single_bit(n_items)) {
        throw ConfigError("n must be a power of two >= 2, got " + std::to_string(n_items));
    }
    return static_cast<std::size_t>(std::countr_zero(n_items));
}

MarkingOracle oracle_for(std::size_t n_qubits, const std::vector<std::uint64_t>& marked)
{
    return MarkingOracle(n_qubits,
                         [&](std::uint64_t i) { return std::binary_search(marked.begin(), marked.end(), i); });
}

std::string grover_curve(std::uint64_t n_items, std::uint64_t n_marked, std::uint64_t trials, std::uint64_t k_max,
                         std::uint64_t seed)
{
    const std::size_t nq = qubits_for(n_items);
    Rng setup = make_rng(seed, 1);
    const auto marked = pick_marked(n_items, n_marked, setup);
    MarkingOracle oracle = oracle_for(nq, marked);

    std::ostringstream csv;
    csv << std::setprecision(10);
    csv << "k,success_rate,theory,trials\n";
    auto amps = StateAccess::release(uniform_superposition(nq));
    std::vector<double> cdf(amps.size());
    for (std::uint64_t k = 0; k <= k_max; ++k) {
        if (k > 0) {
            grover_iterate_inplace(oracle, amps);
        }
        // The pre-measurement state is deterministic; re-measure it `trials` times.
        double acc = 0.0;
        for (std::size_t i = 0; i < amps.size(); ++i) {
            acc += std::norm(amps[i]);
            cdf[i] = acc;
        }
        Rng rng = make_rng(seed, 2, k);
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < trials; ++t) {
            const double u = uniform01(rng) * acc;
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            const auto outcome = static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(
                it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
            hits += oracle.is_marked(outcome);
        }
        csv << k << ',' << static_cast<double>(hits) / static_cast<double>(trials) << ','
            << grover_success_probability(n_items, n_marked, k) << ',' << trials << '\n';
    }
    return csv.str();
}

std::string grover_scaling(std::uint64_t min_exp, std::uint64_t max_exp, std::uint64_t n_marked,
                           std::uint64_t trials, std::uint64_t seed)
{
    if (min_exp < 1 || max_exp < min_exp || max_exp > 24) {
        throw ConfigError("scaling range needs 1 <= min_exp <= max_exp <= 24");
    }
    std::ostringstream csv;
    csv << std::setprecision(10);
    csv << "n_items,mean_total_queries,mean_grover_queries,mean_verifications,failures,exhaustive_queries\n";
    for (std::uint64_t e = min_exp; e <= max_exp; ++e) {
        const std::uint64_t n = std::uint64_t{1} << e;
        if (n_marked < 1 || n_marked > n) {
            throw ConfigError("marked must be in [1, N] for every N in the scaling range");
        }
        double total = 0.0, grover = 0.0, verify = 0.0;
        std::uint64_t failures = 0;
        for (std::uint64_t t = 0; t < trials; ++t) {
            Rng rng = make_rng(seed, 3 + e, t);
            const auto marked = pick_marked(n, n_marked, rng);
            MarkingOracle oracle = oracle_for(static_cast<std::size_t>(e), marked);
            const auto r = bbht_search(oracle, rng);
            total += static_cast<double>(r.total_queries());
            grover += static_cast<double>(r.grover_queries);
            verify += static_cast<double>(r.verification_queries);
            failures += !r.succeeded;
        }
        const auto d = static_cast<double>(trials);
        csv << n << ',' << total / d << ',' << grover / d << ',' << verify / d << ',' << failures << ',' << n << '\n';
    }
    return csv.str();
}

int cmd_grover(RunContext& ctx, const CLI::App& app, std::ostream& out)
{
    auto& cfg = ctx.config;
    const std::uint64_t seed = effective_seed(ctx, app.get_option_no_throw("--seed"));
    const std::string mode = cfg.get_string("mode", "curve");
    const std::uint64_t n_marked = cfg.get_uint("marked", 1);
    const std::uint64_t n = cfg.get_uint("n", 0);
    const bool has_trials = cfg.has("trials");
    const std::uint64_t trials = cfg.get_uint("trials", 0);
    const bool has_k_max = cfg.has("k_max");
    const std::uint64_t k_max = cfg.get_uint("k_max", 0);
    const std::uint64_t min_exp = cfg.get_uint("min_exp", 6);
    const std::uint64_t max_exp = cfg.get_uint("max_exp", 14);
    cfg.finish();
    if (has_trials && trials < 1) {
        throw ConfigError("trials must be >= 1");
    }
    std::string csv;
    if (mode == "curve") {
        qubits_for(n);
        if (n_marked < 1 || n_marked > n) {
            throw ConfigError("marked must be in [1, n]");
        }
        const std::uint64_t k_opt = optimal_grover_iterations(n, n_marked);
        csv = grover_curve(n, n_marked, has_trials ? trials : 10000, has_k_max ? k_max : 2 * k_opt + 1, seed);
    } else if (mode == "scaling") {
        csv = grover_scaling(min_exp, max_exp, n_marked, has_trials ? trials : 200, seed);
    } else {
        throw ConfigError("unknown grover mode '" + mode + "' (curve | scaling)");
    }
    emit(ctx, seed, csv, out);
    return kExitOk;
}

int cmd_ber(RunContext& ctx, const CLI::App& app, std::ostream& out)
{
    auto& cfg = ctx.config;
    const std::uint64_t seed = effective_seed(ctx, app.get_option_no_throw("--seed"));
    const ScenarioParams params = scenario_from_config(cfg);
    BerSweepOptions opt;
    opt.detector = parse_detector_kind(cfg.get_string("detector", "ml_exhaustive"));
    opt.cost = parse_cost_kind(cfg.get_string("cost", "mls_chip"));
    if (cfg.has("ebn0_db")) {
        opt.ebn0_db = cfg.get_double_list("ebn0_db", {});
    } else {
        const double s2 = params.noise_variance;
        opt.ebn0_db = {s2 > 0.0 ? -10.0 * std::log10(s2) : std::numeric_limits<double>::infinity()};
    }
    opt.trials = cfg.get_uint("trials", 1000);
    opt.empirical_mc = cfg.get_uint("empirical_mc", opt.empirical_mc);
    opt.empirical_cells = cfg.get_uint("empirical_cells", opt.empirical_cells);
    opt.qmud.round_budget_factor = cfg.get_double("round_budget", opt.qmud.round_budget_factor);
    opt.qmud.stop_after_failures = cfg.get_uint("stop_after_failures", opt.qmud.stop_after_failures);
    cfg.finish();
    if (opt.trials < 1) {
        throw ConfigError("trials must be >= 1");
    }
    if (opt.detector != DetectorKind::mf && params.users > kMaxExhaustiveUsers) {
        throw ConfigError("K = " + std::to_string(params.users) + " too large for simulation (max " +
                          std::to_string(kMaxExhaustiveUsers) + ")");
    }
    opt.seed = seed;
    opt.threads = ctx.globals.threads;
    const CdmaScenario scenario(params);
    const auto curve = ber_sweep(scenario, opt);
    std::ostringstream csv;
    write_ber_csv(csv, curve);
    emit(ctx, seed, csv.str(), out);
    return kExitOk;
}

int cmd_bsc(RunContext& ctx, const CLI::App& app, std::ostream& out)
{
    auto& cfg = ctx.config;
    const std::uint64_t seed = effective_seed(ctx, app.get_option_no_throw("--seed"));
    const double p = cfg.get_double("p", 0.5);
    const std::uint64_t bits = cfg.get_uint("bits", 100000);
    cfg.finish();
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError("p must lie in [0, 1], got " + std::to_string(p));
    }
    if (bits < 1) {
        throw ConfigError("bits must be >= 1");
    }
    Rng rng = make_rng(seed, 9);
    const auto report = run_demo(bits, p, rng);

    nlohmann::ordered_json j;
    j["n_bits"] = report.n_bits;
    j["p"] = report.p;
    j["classical_errors"] = report.classical_errors;
    j["classical_error_rate"] = report.classical_error_rate;
    j["quantum_errors"] = report.quantum_errors;
    j["quantum_error_rate"] = report.quantum_error_rate;
    j["classical_capacity"] = report.classical_capacity;

    std::ostringstream table;
    table << std::fixed << std::setprecision(6);
    table << "channel     errors      error_rate\n";
    table << "classical   " << std::setw(10) << report.classical_errors << "  " << report.classical_error_rate << '\n';
    table << "quantum     " << std::setw(10) << report.quantum_errors << "  " << report.quantum_error_rate << '\n';
    table << "BSC capacity 1 - H2(p) = " << report.classical_capacity << '\n';

    std::ostringstream csv;
    csv << std::setprecision(10);
    csv << "n_bits,p,classical_errors,classical_error_rate,quantum_errors,quantum_error_rate,classical_capacity\n";
    csv << report.n_bits << ',' << report.p << ',' << report.classical_errors << ',' << report.classical_error_rate
        << ',' << report.quantum_errors << ',' << report.quantum_error_rate << ',' << report.classical_capacity
        << '\n';

    if (ctx.globals.out_path.empty()) {
        out << j.dump(2) << '\n' << table.str();
    } else {
        emit(ctx, seed, csv.str(), out);
        out << j.dump(2) << '\n' << table.str();
    }
    return kExitOk;
}

int cmd_qmud_agree(RunContext& ctx, const CLI::App& app, std::ostream& out, std::ostream& err)
{
    auto& cfg = ctx.config;
    const std::uint64_t seed = effective_seed(ctx, app.get_option_no_throw("--seed"));
    ScenarioParams defaults;
    defaults.users = 10;
    defaults.chips = 16;
    defaults.signature = SignatureKind::random_bipolar;
    defaults.gain = GainModel::rayleigh;
    ScenarioParams params;
    params.users = cfg.get_uint("K", defaults.users);
    params.chips = cfg.get_uint("N_c", defaults.chips);
    params.signature = parse_signature_kind(cfg.get_string("signature", to_string(defaults.signature)));
    params.sync = parse_sync_mode(cfg.get_string("sync", to_string(defaults.sync)));
    params.gain = parse_gain_model(cfg.get_string("gain", to_string(defaults.gain)));
    params.seed = seed;
    const double ebn0 = cfg.get_double("ebn0_db", 8.0);
    const std::uint64_t instances = cfg.get_uint("instances", 1000);
    MaxSearchOptions qopt;
    qopt.round_budget_factor = cfg.get_double("round_budget", qopt.round_budget_factor);
    qopt.stop_after_failures = cfg.get_uint("stop_after_failures", qopt.stop_after_failures);
    cfg.finish();
    params.noise_variance = noise_variance_for_ebn0_db(ebn0);
    validate(params);
    if (params.users > kMaxExhaustiveUsers) {
        throw ConfigError("K = " + std::to_string(params.users) + " exceeds exhaustive limit " +
                          std::to_string(kMaxExhaustiveUsers));
    }
    const CdmaScenario scenario(params);

    std::ostringstream csv;
    csv << "instance,exhaustive_index,qmud_index,agree,unique_argmax,grover_queries,cf_evaluations,"
           "oracle_applications\n";
    std::uint64_t unique = 0, agree = 0, applications = 0;
    for (std::uint64_t i = 0; i < instances; ++i) {
        Rng rng = make_rng(seed, 11, i);
        const auto channel = sample_channel(scenario, rng);
        const auto bits = random_bits(params.users, rng);
        const auto prev = random_bits(params.users, rng);
        const auto frame = synthesize_received(scenario, channel, bits, prev, rng);
        CostFunction cf = make_mls_cost(frame, scenario, channel);
        const auto ml = exhaustive_ml_detect(cf, params.users);
        const auto q = qmud_detect(cf, params.users, rng, qopt);
        const bool same = ml.detected_index == q.detected_index;
        if (!ml.tie_degenerate) {
            ++unique;
            agree += same;
            applications += q.oracle_applications();
        }
        csv << i << ',' << ml.detected_index << ',' << q.detected_index << ',' << same << ','
            << !ml.tie_degenerate << ',' << q.grover_queries << ',' << q.cf_evaluations << ','
            << q.oracle_applications() << '\n';
    }
    emit(ctx, seed, csv.str(), out);
    if (unique > 0) {
        err << "qmud-agree: " << agree << "/" << unique << " unique-argmax instances agree; mean oracle applications "
            << static_cast<double>(applications) / static_cast<double>(unique) << " vs exhaustive "
            << (std::uint64_t{1} << params.users) << '\n';
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Quantum-assisted multi-user detection simulator", "qmud"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions globals;
    app.add_option("--config", globals.config_path, "Flat key = value config file");
    app.add_option("--seed", globals.seed, "Random seed");
    app.add_option("--out", globals.out_path, "CSV output path (manifest written alongside)");
    app.add_option("--threads", globals.threads, "Worker threads")->check(CLI::PositiveNumber);

    // grover
    auto* grover = app.add_subcommand("grover", "Grover success curve or BBHT query scaling");
    std::uint64_t g_n = 0, g_marked = 1, g_trials = 0, g_kmax = 0, g_min = 0, g_max = 0;
    std::string g_mode;
    auto* g_n_opt = grover->add_option("--n", g_n, "Search space size N (power of two)");
    auto* g_m_opt = grover->add_option("--marked", g_marked, "Number of marked items M");
    auto* g_t_opt = grover->add_option("--trials", g_trials, "Trials per point");
    auto* g_k_opt = grover->add_option("--k-max", g_kmax, "Largest iteration count in the curve");
    auto* g_mode_opt = grover->add_option("--mode", g_mode, "curve | scaling");
    auto* g_min_opt = grover->add_option("--min-exp", g_min, "Scaling: smallest log2 N");
    auto* g_max_opt = grover->add_option("--max-exp", g_max, "Scaling: largest log2 N");

    // ber
    auto* ber = app.add_subcommand("ber", "Monte-Carlo BER sweep for one detector");
    std::uint64_t b_k = 0, b_nc = 0, b_trials = 0;
    std::string b_det, b_cost, b_sig, b_sync, b_gain;
    double b_sigma2 = 0.0;
    std::vector<double> b_ebn0;
    auto* b_k_opt = ber->add_option("--K", b_k, "Users");
    auto* b_nc_opt = ber->add_option("--N_c", b_nc, "Chips per symbol");
    auto* b_det_opt = ber->add_option("--detector", b_det, "mf | ml_exhaustive | qmud");
    auto* b_cost_opt = ber->add_option("--cost", b_cost, "mls_chip | mls_mf | empirical");
    auto* b_sig_opt = ber->add_option("--signature", b_sig, "walsh | random_bipolar");
    auto* b_sync_opt = ber->add_option("--sync", b_sync, "synchronous | asynchronous");
    auto* b_gain_opt = ber->add_option("--gain", b_gain, "fixed | rayleigh");
    auto* b_s2_opt = ber->add_option("--sigma2", b_sigma2, "Noise variance (used when no Eb/N0 list)");
    auto* b_ebn0_opt = ber->add_option("--ebn0", b_ebn0, "Eb/N0 points in dB")->delimiter(',');
    auto* b_t_opt = ber->add_option("--trials", b_trials, "Trials per point");

    // bsc
    auto* bsc = app.add_subcommand("bsc", "Bit-flip channel: classical vs phase-basis qubit");
    double p = 0.5;
    std::uint64_t bits = 0;
    auto* p_opt = bsc->add_option("--p", p, "Flip probability");
    auto* bits_opt = bsc->add_option("--bits", bits, "Bits to send");

    // qmud-agree
    auto* agree = app.add_subcommand("qmud-agree", "QMUD vs exhaustive ML agreement on random frames");
    std::uint64_t a_k = 0, a_inst = 0;
    double a_ebn0 = 0.0;
    auto* a_k_opt = agree->add_option("--K", a_k, "Users");
    auto* a_inst_opt = agree->add_option("--instances", a_inst, "Random instances");
    auto* a_ebn0_opt = agree->add_option("--ebn0", a_ebn0, "Eb/N0 in dB");

    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    RunContext ctx;
    ctx.globals = globals;
    ctx.argv.assign(args.begin() + (args.empty() ? 0 : 1), args.end());
    try {
        ctx.config = load_config(globals);
        if (grover->parsed()) {
            ctx.subcommand = "grover";
            auto& c = ctx.config;
            override_if_given(c, g_n_opt, "n", g_n);
            override_if_given(c, g_m_opt, "marked", g_marked);
            override_if_given(c, g_t_opt, "trials", g_trials);
            override_if_given(c, g_k_opt, "k_max", g_kmax);
            override_if_given(c, g_mode_opt, "mode", g_mode);
            override_if_given(c, g_min_opt, "min_exp", g_min);
            override_if_given(c, g_max_opt, "max_exp", g_max);
            if (ctx.config.get_string("mode", "curve") == "curve" && !ctx.config.has("n")) {
                err << "usage error: grover needs --n\n\n" << grover->help();
                return kExitUsage;
            }
            return cmd_grover(ctx, app, out);
        }
        if (ber->parsed()) {
            ctx.subcommand = "ber";
            auto& c = ctx.config;
            override_if_given(c, b_k_opt, "K", b_k);
            override_if_given(c, b_nc_opt, "N_c", b_nc);
            override_if_given(c, b_det_opt, "detector", b_det);
            override_if_given(c, b_cost_opt, "cost", b_cost);
            override_if_given(c, b_sig_opt, "signature", b_sig);
            override_if_given(c, b_sync_opt, "sync", b_sync);
            override_if_given(c, b_gain_opt, "gain", b_gain);
            override_if_given(c, b_s2_opt, "sigma2", b_sigma2);
            override_list_if_given(c, b_ebn0_opt, "ebn0_db", b_ebn0);
            override_if_given(c, b_t_opt, "trials", b_trials);
            return cmd_ber(ctx, app, out);
        }
        if (bsc->parsed()) {
            ctx.subcommand = "bsc";
            override_if_given(ctx.config, p_opt, "p", p);
            override_if_given(ctx.config, bits_opt, "bits", bits);
            return cmd_bsc(ctx, app, out);
        }
        ctx.subcommand = "qmud-agree";
        override_if_given(ctx.config, a_k_opt, "K", a_k);
        override_if_given(ctx.config, a_inst_opt, "instances", a_inst);
        override_if_given(ctx.config, a_ebn0_opt, "ebn0_db", a_ebn0);
        return cmd_qmud_agree(ctx, app, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace qmud::cli
