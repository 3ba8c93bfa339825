#include "qmud/mud.hpp"

#include "qmud/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

namespace qmud {
namespace {

// Chip-domain pieces of every hypothesis' reconstruction:
// r_hat(b) = prev_part + sum_k b_k * user_part[k].
struct Reconstruction {
    std::vector<Complex> prev_part;
    std::vector<std::vector<Complex>> user_part;
};

Reconstruction decompose(const CdmaScenario& scenario, const ChannelState& channel, std::span<const int> prev_bits)
{
    const std::size_t k_users = scenario.users();
    const std::size_t nc = scenario.chips();
    Reconstruction r;
    r.prev_part.assign(nc, Complex{});
    r.user_part.assign(k_users, std::vector<Complex>(nc));
    for (std::size_t k = 0; k < k_users; ++k) {
        const Complex a = channel.users[k].coefficient();
        const std::size_t tau = channel.users[k].delay;
        const auto& s = scenario.signatures()[k].chips;
        for (std::size_t t = 0; t < tau; ++t) {
            r.prev_part[t] += a * static_cast<double>(prev_bits[k]) * s[t - tau + nc];
        }
        for (std::size_t t = tau; t < nc; ++t) {
            r.user_part[k][t] = a * s[t - tau];
        }
    }
    return r;
}

BitVector prev_bits_or_ones(std::span<const int> prev_bits, std::size_t users)
{
    if (prev_bits.empty()) {
        return BitVector(users, 1);
    }
    return BitVector(prev_bits.begin(), prev_bits.end());
}

double negative_squared_distance(std::span<const Complex> a, std::span<const Complex> b)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::norm(a[i] - b[i]);
    }
    return -acc;
}

void fill_argmax_report(DetectionReport& report, std::span<const double> scores, std::uint64_t chosen,
                        std::size_t users)
{
    report.detected_index = chosen;
    report.detected_bits = hypothesis_from_index(chosen, users).bits;
    const double best = scores[chosen];
    report.tie_degenerate = std::count(scores.begin(), scores.end(), best) > 1;
}

}  // namespace

Hypothesis hypothesis_from_index(std::uint64_t index, std::size_t users)
{
    if (users < 1 || users > 63) {
        throw DomainError("user count " + std::to_string(users) + " outside [1, 63]");
    }
    if (index >= (std::uint64_t{1} << users)) {
        throw DomainError("hypothesis index " + std::to_string(index) + " outside [0, 2^" + std::to_string(users) +
                          ")");
    }
    Hypothesis h;
    h.index = index;
    h.bits.resize(users);
    for (std::size_t k = 0; k < users; ++k) {
        h.bits[k] = ((index >> k) & 1u) ? -1 : 1;
    }
    return h;
}

std::uint64_t index_from_bits(std::span<const int> bits)
{
    if (bits.empty() || bits.size() > 63) {
        throw DomainError("bit vector length " + std::to_string(bits.size()) + " outside [1, 63]");
    }
    std::uint64_t m = 0;
    for (std::size_t k = 0; k < bits.size(); ++k) {
        if (bits[k] == -1) {
            m |= std::uint64_t{1} << k;
        } else if (bits[k] != 1) {
            throw DomainError("bit entries must be +1 or -1");
        }
    }
    return m;
}

std::string to_string(CostKind kind)
{
    switch (kind) {
    case CostKind::mls_chip: return "mls_chip";
    case CostKind::mls_mf: return "mls_mf";
    case CostKind::empirical: return "empirical";
    }
    return "unknown";
}

CostKind parse_cost_kind(const std::string& text)
{
    if (text == "mls_chip") return CostKind::mls_chip;
    if (text == "mls_mf") return CostKind::mls_mf;
    if (text == "empirical") return CostKind::empirical;
    throw ConfigError("unknown cost function '" + text + "' (mls_chip | mls_mf | empirical)");
}

CostFunction::CostFunction(CostKind kind, std::size_t users, Evaluator evaluator)
    : kind_(kind), users_(users), evaluator_(std::move(evaluator))
{
    if (users < 1 || users > 63) {
        throw DomainError("user count " + std::to_string(users) + " outside [1, 63]");
    }
}

double CostFunction::evaluate(std::uint64_t index)
{
    ++evaluations_;
    return peek(index);
}

double CostFunction::peek(std::uint64_t index) const
{
    if (index >= hypotheses()) {
        throw DomainError("hypothesis index " + std::to_string(index) + " outside [0, " +
                          std::to_string(hypotheses()) + ")");
    }
    return evaluator_(index);
}

double mls_cost(const ReceivedFrame& frame, const CdmaScenario& scenario, const ChannelState& channel,
                std::uint64_t index, CostKind kind)
{
    const auto h = hypothesis_from_index(index, scenario.users());
    const auto prev = prev_bits_or_ones(frame.prev_bits, scenario.users());
    const auto reconstruction = noiseless_samples(scenario, channel, h.bits, prev);
    switch (kind) {
    case CostKind::mls_chip:
        if (frame.samples.size() != reconstruction.size()) {
            throw ShapeError("frame length does not match N_c");
        }
        return negative_squared_distance(frame.samples, reconstruction);
    case CostKind::mls_mf: {
        const auto y = matched_filter_bank(frame, scenario, channel);
        const auto w = matched_filter_bank(reconstruction, scenario, channel);
        return negative_squared_distance(y.y, w.y);
    }
    case CostKind::empirical: break;
    }
    throw DomainError("mls_cost supports mls_chip and mls_mf only");
}

CostFunction make_mls_cost(const ReceivedFrame& frame, const CdmaScenario& scenario, const ChannelState& channel,
                           CostKind kind)
{
    const std::size_t users = scenario.users();
    if (frame.samples.size() != scenario.chips()) {
        throw ShapeError("frame has " + std::to_string(frame.samples.size()) + " samples, expected N_c = " +
                         std::to_string(scenario.chips()));
    }
    if (channel.users.size() != users) {
        throw ShapeError("channel/scenario user count mismatch");
    }
    for (const auto& u : channel.users) {
        if (u.delay >= scenario.chips()) {
            throw DomainError("delay " + std::to_string(u.delay) + " outside [0, N_c)");
        }
    }
    const auto prev = prev_bits_or_ones(frame.prev_bits, users);
    auto parts = decompose(scenario, channel, prev);

    if (kind == CostKind::mls_chip) {
        auto evaluator = [parts = std::move(parts), target = frame.samples, users](std::uint64_t m) {
            double acc = 0.0;
            for (std::size_t t = 0; t < target.size(); ++t) {
                Complex r = parts.prev_part[t];
                for (std::size_t k = 0; k < users; ++k) {
                    r += ((m >> k) & 1u) ? -parts.user_part[k][t] : parts.user_part[k][t];
                }
                acc += std::norm(target[t] - r);
            }
            return -acc;
        };
        return CostFunction(kind, users, std::move(evaluator));
    }
    if (kind == CostKind::mls_mf) {
        const auto y = matched_filter_bank(frame, scenario, channel).y;
        auto prev_image = matched_filter_bank(parts.prev_part, scenario, channel).y;
        std::vector<std::vector<Complex>> user_image;
        for (const auto& u : parts.user_part) {
            user_image.push_back(matched_filter_bank(u, scenario, channel).y);
        }
        auto evaluator = [y, prev_image = std::move(prev_image), user_image = std::move(user_image),
                          users](std::uint64_t m) {
            double acc = 0.0;
            for (std::size_t i = 0; i < users; ++i) {
                Complex w = prev_image[i];
                for (std::size_t k = 0; k < users; ++k) {
                    w += ((m >> k) & 1u) ? -user_image[k][i] : user_image[k][i];
                }
                acc += std::norm(y[i] - w);
            }
            return -acc;
        };
        return CostFunction(kind, users, std::move(evaluator));
    }
    throw DomainError("make_mls_cost supports mls_chip and mls_mf only");
}

QuantizationGrid QuantizationGrid::for_noise(double noise_variance, std::size_t cells_per_dim)
{
    return QuantizationGrid{cells_per_dim, 1.0 + 3.0 * std::sqrt(std::max(noise_variance, 0.0))};
}

std::vector<std::size_t> QuantizationGrid::cell_of(std::span<const Complex> y) const
{
    if (cells_per_dim < 1 || !(half_width > 0.0)) {
        throw ConfigError("quantization grid needs >= 1 cell and a positive half width");
    }
    std::vector<std::size_t> cells;
    cells.reserve(2 * y.size());
    const double width = 2.0 * half_width / static_cast<double>(cells_per_dim);
    for (const auto& z : y) {
        for (const double v : {z.real(), z.imag()}) {
            if (!(v >= -half_width && v <= half_width)) {
                return {};
            }
            const auto c = static_cast<std::size_t>(std::floor((v + half_width) / width));
            cells.push_back(std::min(c, cells_per_dim - 1));
        }
    }
    return cells;
}

double empirical_cost(const CdmaScenario& scenario, const MfOutputs& y_observed, std::uint64_t index,
                      std::size_t n_mc, Rng& rng, const QuantizationGrid& grid, std::span<const int> prev_bits)
{
    if (n_mc < 1) {
        throw DomainError("empirical cost needs n_mc >= 1");
    }
    if (y_observed.y.size() != scenario.users()) {
        throw ShapeError("observed MF vector length does not match K");
    }
    const auto target = grid.cell_of(y_observed.y);
    if (target.empty()) {
        return 0.0;
    }
    const auto h = hypothesis_from_index(index, scenario.users());
    const auto prev = prev_bits_or_ones(prev_bits, scenario.users());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n_mc; ++i) {
        const auto channel = sample_channel(scenario, rng);
        const auto frame = synthesize_received(scenario, channel, h.bits, prev, rng);
        const auto y = matched_filter_bank(frame, scenario, channel);
        if (grid.cell_of(y.y) == target) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(n_mc);
}

CostFunction make_empirical_cost(const CdmaScenario& scenario, const MfOutputs& y_observed, std::size_t n_mc,
                                 std::uint64_t seed, const QuantizationGrid& grid)
{
    auto evaluator = [scenario, y_observed, n_mc, seed, grid](std::uint64_t m) {
        Rng rng = make_rng(seed, 0xe3c, m);
        return empirical_cost(scenario, y_observed, m, n_mc, rng, grid);
    };
    return CostFunction(CostKind::empirical, scenario.users(), std::move(evaluator));
}

std::size_t grade(DetectionReport& report, std::span<const int> true_bits)
{
    if (true_bits.size() != report.detected_bits.size()) {
        throw ShapeError("true bits and detected bits differ in length");
    }
    std::size_t errors = 0;
    for (std::size_t k = 0; k < true_bits.size(); ++k) {
        errors += report.detected_bits[k] != true_bits[k];
    }
    report.correct = errors == 0;
    return errors;
}

DetectionReport mf_detect(const MfOutputs& y, const ChannelState& channel)
{
    if (y.y.size() != channel.users.size()) {
        throw ShapeError("MF output length does not match channel user count");
    }
    DetectionReport report;
    report.detected_bits.resize(y.y.size());
    for (std::size_t k = 0; k < y.y.size(); ++k) {
        const double decision = (std::conj(channel.users[k].coefficient()) * y.y[k]).real();
        report.detected_bits[k] = decision >= 0.0 ? 1 : -1;
    }
    report.detected_index = index_from_bits(report.detected_bits);
    return report;
}

DetectionReport exhaustive_ml_detect(CostFunction& cf, std::size_t users)
{
    if (users > kMaxExhaustiveUsers) {
        throw SizeError("exhaustive detection limited to K <= " + std::to_string(kMaxExhaustiveUsers));
    }
    if (users != cf.users()) {
        throw ShapeError("cost function is over " + std::to_string(cf.users()) + " users, asked for " +
                         std::to_string(users));
    }
    const std::uint64_t n = std::uint64_t{1} << users;
    std::vector<double> scores(n);
    std::uint64_t best = 0;
    for (std::uint64_t m = 0; m < n; ++m) {
        scores[m] = cf.evaluate(m);
        if (scores[m] > scores[best]) {
            best = m;
        }
    }
    DetectionReport report;
    report.cf_evaluations = n;
    fill_argmax_report(report, scores, best, users);
    return report;
}

DetectionReport qmud_detect(CostFunction& cf, std::size_t users, Rng& rng, const MaxSearchOptions& options)
{
    if (users != cf.users()) {
        throw ShapeError("cost function is over " + std::to_string(cf.users()) + " users, asked for " +
                         std::to_string(users));
    }
    if (users > options.tol.max_qubits) {
        throw SizeError("K = " + std::to_string(users) + " exceeds the register maximum");
    }
    // One register of K qubits holds every hypothesis; the CF is tabulated once
    // to build the diagonal threshold oracles.
    std::vector<double> table(cf.hypotheses());
    for (std::uint64_t m = 0; m < table.size(); ++m) {
        table[m] = cf.peek(m);
    }
    const auto search = maximum_search(table, rng, options);
    DetectionReport report;
    report.grover_queries = search.grover_queries;
    report.threshold_rounds = search.threshold_rounds;
    // Classical evaluations of measured indices, plus one per oracle built.
    report.cf_evaluations = search.verification_queries + search.threshold_rounds;
    fill_argmax_report(report, table, *search.found, users);
    return report;
}

std::string to_string(DetectorKind kind)
{
    switch (kind) {
    case DetectorKind::mf: return "mf";
    case DetectorKind::ml_exhaustive: return "ml_exhaustive";
    case DetectorKind::qmud: return "qmud";
    }
    return "unknown";
}

DetectorKind parse_detector_kind(const std::string& text)
{
    if (text == "mf") return DetectorKind::mf;
    if (text == "ml_exhaustive" || text == "ml") return DetectorKind::ml_exhaustive;
    if (text == "qmud") return DetectorKind::qmud;
    throw ConfigError("unknown detector '" + text + "' (mf | ml_exhaustive | qmud)");
}

namespace {

struct TrialResult {
    std::size_t bit_errors = 0;
    std::uint64_t cf_evaluations = 0;
    std::uint64_t grover_queries = 0;
};

TrialResult run_trial(const CdmaScenario& scenario, const BerSweepOptions& options, std::uint64_t point,
                      std::uint64_t trial)
{
    Rng rng = make_rng(options.seed, point + 1, trial);
    const auto channel = sample_channel(scenario, rng);
    const auto bits = random_bits(scenario.users(), rng);
    const auto prev = random_bits(scenario.users(), rng);
    const auto frame = synthesize_received(scenario, channel, bits, prev, rng);

    DetectionReport report;
    if (options.detector == DetectorKind::mf) {
        report = mf_detect(matched_filter_bank(frame, scenario, channel), channel);
    } else {
        CostFunction cf = options.cost == CostKind::empirical
                              ? make_empirical_cost(scenario, matched_filter_bank(frame, scenario, channel),
                                                    options.empirical_mc, rng(),
                                                    QuantizationGrid::for_noise(scenario.noise_variance(),
                                                                                options.empirical_cells))
                              : make_mls_cost(frame, scenario, channel, options.cost);
        report = options.detector == DetectorKind::ml_exhaustive
                     ? exhaustive_ml_detect(cf, scenario.users())
                     : qmud_detect(cf, scenario.users(), rng, options.qmud);
    }
    TrialResult r;
    r.bit_errors = grade(report, bits);
    r.cf_evaluations = report.cf_evaluations;
    r.grover_queries = report.grover_queries;
    return r;
}

}  // namespace

BerCurve ber_sweep(const CdmaScenario& scenario_template, const BerSweepOptions& options)
{
    if (options.trials < 1) {
        throw DomainError("BER sweep needs trials >= 1");
    }
    const std::size_t threads = std::max<std::size_t>(1, options.threads);
    BerCurve curve;
    for (std::uint64_t p = 0; p < options.ebn0_db.size(); ++p) {
        const double ebn0 = options.ebn0_db[p];
        const auto scenario = scenario_template.with_noise_variance(noise_variance_for_ebn0_db(ebn0));
        std::vector<TrialResult> results(options.trials);
        std::exception_ptr failure;
        std::mutex failure_lock;
        auto worker = [&](std::size_t w) {
            try {
                for (std::uint64_t t = w; t < options.trials; t += threads) {
                    results[t] = run_trial(scenario, options, p, t);
                }
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        };
        if (threads == 1) {
            worker(0);
        } else {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < threads; ++w) {
                pool.emplace_back(worker, w);
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
        BerPoint point;
        point.ebn0_db = ebn0;
        point.trials = options.trials;
        double cf_sum = 0.0;
        double grover_sum = 0.0;
        for (const auto& r : results) {
            point.bit_errors += r.bit_errors;
            cf_sum += static_cast<double>(r.cf_evaluations);
            grover_sum += static_cast<double>(r.grover_queries);
        }
        const double n = static_cast<double>(options.trials);
        point.ber = static_cast<double>(point.bit_errors) / (n * static_cast<double>(scenario.users()));
        point.mean_cf_evaluations = cf_sum / n;
        point.mean_grover_queries = grover_sum / n;
        curve.points.push_back(point);
    }
    return curve;
}

void write_ber_csv(std::ostream& os, const BerCurve& curve)
{
    const auto flags = os.flags();
    const auto precision = os.precision(10);
    os << "ebn0_db,ber,trials,mean_cf_evals,mean_grover_queries\n";
    for (const auto& p : curve.points) {
        if (std::isinf(p.ebn0_db)) {
            os << (p.ebn0_db > 0 ? "inf" : "-inf");
        } else {
            os << p.ebn0_db;
        }
        os << ',' << p.ber << ',' << p.trials << ',' << p.mean_cf_evaluations << ',' << p.mean_grover_queries
           << '\n';
    }
    os.precision(precision);
    os.flags(flags);
}

}  // namespace qmud
