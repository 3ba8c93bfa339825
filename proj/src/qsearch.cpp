#include "qmud/qsearch.hpp"

#include "qmud/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace qmud {
namespace {

std::uint64_t budget_from_factor(double factor, std::uint64_t n_items)
{
    return static_cast<std::uint64_t>(std::ceil(factor * std::sqrt(static_cast<double>(n_items))));
}

SearchReport measure_and_verify(MarkingOracle& oracle, std::span<const Complex> amplitudes, Rng& rng,
                                SearchReport report)
{
    const std::uint64_t outcome = sample_outcome(amplitudes, rng);
    if (oracle.verify(outcome)) {
        report.found = outcome;
        report.succeeded = true;
    }
    return report;
}

}  // namespace

MarkingOracle::MarkingOracle(std::size_t n_qubits, const Predicate& predicate, const Tolerances& tol)
    : n_qubits_(n_qubits)
{
    if (n_qubits < 1 || n_qubits > tol.max_qubits) {
        throw SizeError("oracle register of " + std::to_string(n_qubits) + " qubits outside [1, " +
                        std::to_string(tol.max_qubits) + "]");
    }
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    marks_.resize(dim);
    for (std::uint64_t i = 0; i < dim; ++i) {
        marks_[i] = predicate(i) ? 1 : 0;
        marked_ += marks_[i];
    }
}

void MarkingOracle::apply_phase_flip(std::span<Complex> amplitudes)
{
    if (amplitudes.size() != marks_.size()) {
        throw ShapeError("oracle over " + std::to_string(marks_.size()) + " indices applied to register of " +
                         std::to_string(amplitudes.size()));
    }
    ++queries_;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        if (marks_[i]) {
            amplitudes[i] = -amplitudes[i];
        }
    }
}

bool MarkingOracle::verify(std::uint64_t index)
{
    ++verifications_;
    return marks_.at(index) != 0;
}

UnitaryOp MarkingOracle::as_unitary() const
{
    std::vector<Complex> phases(marks_.size());
    std::transform(marks_.begin(), marks_.end(), phases.begin(),
                   [](std::uint8_t m) { return m ? Complex{-1.0} : Complex{1.0}; });
    return UnitaryOp::diagonal(std::move(phases));
}

double grover_success_probability(std::uint64_t n_items, std::uint64_t n_marked, std::uint64_t iterations)
{
    if (n_items == 0 || n_marked > n_items) {
        throw DomainError("need 0 <= M <= N with N >= 1");
    }
    const double theta = std::asin(std::sqrt(static_cast<double>(n_marked) / static_cast<double>(n_items)));
    const double s = std::sin((2.0 * static_cast<double>(iterations) + 1.0) * theta);
    return s * s;
}

std::uint64_t optimal_grover_iterations(std::uint64_t n_items, std::uint64_t n_marked)
{
    if (n_marked < 1 || n_marked > n_items) {
        throw DomainError("known solution count " + std::to_string(n_marked) + " outside [1, " +
                          std::to_string(n_items) + "]");
    }
    const double theta = std::asin(std::sqrt(static_cast<double>(n_marked) / static_cast<double>(n_items)));
    const double k = std::round(std::numbers::pi / (4.0 * theta) - 0.5);
    return k > 0.0 ? static_cast<std::uint64_t>(k) : 0;
}

void grover_iterate_inplace(MarkingOracle& oracle, std::span<Complex> amplitudes)
{
    oracle.apply_phase_flip(amplitudes);
    // Inversion about the mean: 2|u><u| - I.
    Complex sum = 0.0;
    for (const auto& a : amplitudes) {
        sum += a;
    }
    const Complex twice_mean = 2.0 * sum / static_cast<double>(amplitudes.size());
    for (auto& a : amplitudes) {
        a = twice_mean - a;
    }
}

StateVector grover_iterate(MarkingOracle& oracle, const StateVector& s)
{
    if (s.n_qubits() != oracle.n_qubits()) {
        throw ShapeError("state of " + std::to_string(s.n_qubits()) + " qubits, oracle of " +
                         std::to_string(oracle.n_qubits()));
    }
    std::vector<Complex> amps(s.amplitudes().begin(), s.amplitudes().end());
    grover_iterate_inplace(oracle, amps);
    return StateAccess::adopt(s.n_qubits(), std::move(amps));
}

SearchReport grover_run(MarkingOracle& oracle, std::uint64_t iterations, Rng& rng)
{
    auto amps = StateAccess::release(uniform_superposition(oracle.n_qubits()));
    const std::uint64_t q0 = oracle.query_count();
    const std::uint64_t v0 = oracle.verification_count();
    for (std::uint64_t k = 0; k < iterations; ++k) {
        grover_iterate_inplace(oracle, amps);
    }
    SearchReport report;
    report.iterations_used = iterations;
    report = measure_and_verify(oracle, amps, rng, report);
    report.grover_queries = oracle.query_count() - q0;
    report.verification_queries = oracle.verification_count() - v0;
    return report;
}

SearchReport grover_search(MarkingOracle& oracle, std::uint64_t m_known, Rng& rng)
{
    return grover_run(oracle, optimal_grover_iterations(oracle.dimension(), m_known), rng);
}

SearchReport bbht_search(MarkingOracle& oracle, Rng& rng, const BbhtOptions& options)
{
    BbhtSchedule schedule;
    return bbht_search(oracle, rng, options, schedule);
}

SearchReport bbht_search(MarkingOracle& oracle, Rng& rng, const BbhtOptions& options, BbhtSchedule& schedule)
{
    if (options.growth <= 1.0) {
        throw DomainError("BBHT growth factor must exceed 1");
    }
    const std::uint64_t n = oracle.dimension();
    const double cap = std::sqrt(static_cast<double>(n));
    const std::uint64_t budget = options.max_total_queries.value_or(budget_from_factor(options.budget_factor, n));
    const std::uint64_t q0 = oracle.query_count();
    const std::uint64_t v0 = oracle.verification_count();
    const auto spent = [&] { return oracle.query_count() - q0 + oracle.verification_count() - v0; };

    SearchReport report;
    const auto uniform = uniform_superposition(oracle.n_qubits());
    std::vector<Complex> amps;
    schedule.scale = std::clamp(schedule.scale, 1.0, std::max(1.0, cap));
    while (true) {
        // j uniform over the nonnegative integers smaller than m.
        const auto choices = static_cast<std::uint64_t>(std::ceil(schedule.scale - 1e-12));
        const std::uint64_t j = uniform_index(rng, std::max<std::uint64_t>(choices, 1));
        if (spent() + j + 1 > budget) {
            break;
        }
        amps.assign(uniform.amplitudes().begin(), uniform.amplitudes().end());
        for (std::uint64_t step = 0; step < j; ++step) {
            grover_iterate_inplace(oracle, amps);
        }
        ++report.iterations_used;
        report = measure_and_verify(oracle, amps, rng, report);
        if (report.succeeded) {
            break;
        }
        schedule.scale = std::min(options.growth * schedule.scale, cap);
    }
    report.grover_queries = oracle.query_count() - q0;
    report.verification_queries = oracle.verification_count() - v0;
    return report;
}

bool existence_test(MarkingOracle& oracle, Rng& rng, std::size_t confidence_rounds, const ExistenceOptions& options)
{
    if (confidence_rounds < 1) {
        throw DomainError("existence test needs at least one round");
    }
    BbhtOptions bbht;
    bbht.growth = options.growth;
    bbht.max_total_queries = budget_from_factor(options.round_budget_factor, oracle.dimension());
    for (std::size_t r = 0; r < confidence_rounds; ++r) {
        if (bbht_search(oracle, rng, bbht).succeeded) {
            return true;
        }
    }
    return false;
}

SearchReport maximum_search(const ScoreFunction& score, std::size_t n_qubits, Rng& rng,
                            const MaxSearchOptions& options)
{
    if (n_qubits < 1 || n_qubits > options.tol.max_qubits) {
        throw SizeError("maximum search over " + std::to_string(n_qubits) + " qubits outside [1, " +
                        std::to_string(options.tol.max_qubits) + "]");
    }
    std::vector<double> table(std::uint64_t{1} << n_qubits);
    for (std::uint64_t i = 0; i < table.size(); ++i) {
        table[i] = score(i);
    }
    return maximum_search(table, rng, options);
}

SearchReport maximum_search(std::span<const double> scores, Rng& rng, const MaxSearchOptions& options)
{
    if (scores.size() < 2 || !std::has_single_bit(scores.size())) {
        throw ShapeError("score table length " + std::to_string(scores.size()) + " is not 2^n with n >= 1");
    }
    const auto n_qubits = static_cast<std::size_t>(std::countr_zero(scores.size()));
    SearchReport report;
    std::uint64_t incumbent = uniform_index(rng, scores.size());
    report.verification_queries = 1;  // scoring the initial sample

    BbhtOptions bbht;
    bbht.growth = options.growth;
    bbht.max_total_queries = budget_from_factor(options.round_budget_factor, scores.size());
    BbhtSchedule schedule;
    std::size_t failures = 0;
    while (failures < options.stop_after_failures) {
        const double threshold = scores[incumbent];
        MarkingOracle oracle(n_qubits, [&](std::uint64_t i) { return scores[i] > threshold; }, options.tol);
        if (!options.warm_start_schedule) {
            schedule = BbhtSchedule{};
        }
        const auto round = bbht_search(oracle, rng, bbht, schedule);
        ++report.threshold_rounds;
        report.grover_queries += round.grover_queries;
        report.verification_queries += round.verification_queries;
        report.iterations_used += round.iterations_used;
        if (round.succeeded) {
            incumbent = *round.found;
            failures = 0;
        } else {
            ++failures;
        }
    }
    report.found = incumbent;
    report.succeeded = true;
    return report;
}

}  // namespace qmud
