#pragma once

// Grover-family search over an index space of size N = 2^n.
//
// Query accounting: every application of the oracle's phase flip to the
// register is one Grover query; every classical predicate check of a measured
// index is one verification query. "Total queries" is the sum, which is what
// classical exhaustive search (N predicate evaluations) is compared against.

#include "qmud/qcore.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace qmud {

class MarkingOracle {
public:
    using Predicate = std::function<bool(std::uint64_t)>;

    // The predicate is evaluated once per basis index here and compiled into a
    // diagonal phase flip; it must be deterministic.
    MarkingOracle(std::size_t n_qubits, const Predicate& predicate,
                  const Tolerances& tol = kDefaultTolerances);

    std::size_t n_qubits() const noexcept { return n_qubits_; }
    std::uint64_t dimension() const noexcept { return marks_.size(); }

    // Flips the sign of marked amplitudes in place. One Grover query.
    void apply_phase_flip(std::span<Complex> amplitudes);
    // Classical check of a measured index. One verification query.
    bool verify(std::uint64_t index);

    std::uint64_t query_count() const noexcept { return queries_; }
    std::uint64_t verification_count() const noexcept { return verifications_; }

    // Simulator-side introspection; does not count as a query.
    std::uint64_t marked_count() const noexcept { return marked_; }
    bool is_marked(std::uint64_t index) const { return marks_.at(index) != 0; }

    // The oracle as an explicit diagonal unitary (+1 / -1 entries).
    UnitaryOp as_unitary() const;

private:
    std::size_t n_qubits_;
    std::vector<std::uint8_t> marks_;
    std::uint64_t marked_ = 0;
    std::uint64_t queries_ = 0;
    std::uint64_t verifications_ = 0;
};

struct SearchReport {
    std::optional<std::uint64_t> found;
    std::uint64_t grover_queries = 0;
    std::uint64_t verification_queries = 0;
    // grover_search: Grover iterations run. bbht_search / maximum_search:
    // number of measure-and-verify rounds.
    std::uint64_t iterations_used = 0;
    // maximum_search only: threshold rounds (one oracle per round).
    std::uint64_t threshold_rounds = 0;
    bool succeeded = false;

    std::uint64_t total_queries() const noexcept { return grover_queries + verification_queries; }
};

// sin^2((2k+1) theta), theta = arcsin(sqrt(M/N)).
double grover_success_probability(std::uint64_t n_items, std::uint64_t n_marked, std::uint64_t iterations);
// round(pi / (4 theta) - 1/2), clamped at 0.
std::uint64_t optimal_grover_iterations(std::uint64_t n_items, std::uint64_t n_marked);

// D * O_f * s with D = 2|u><u| - I. One Grover query.
StateVector grover_iterate(MarkingOracle& oracle, const StateVector& s);
// Same step evolving a raw amplitude buffer in place.
void grover_iterate_inplace(MarkingOracle& oracle, std::span<Complex> amplitudes);

// Prepares the uniform state, runs `iterations` Grover steps, measures and verifies.
SearchReport grover_run(MarkingOracle& oracle, std::uint64_t iterations, Rng& rng);
// grover_run with the optimal iteration count for a known number of solutions.
SearchReport grover_search(MarkingOracle& oracle, std::uint64_t m_known, Rng& rng);

struct BbhtOptions {
    double growth = 1.2;                    // lambda in m <- min(lambda m, sqrt N)
    std::optional<std::uint64_t> max_total_queries;  // default: budget_factor * sqrt(N)
    double budget_factor = 16.0;
};

// Schedule scale m, exposed so a caller can carry it between related searches.
struct BbhtSchedule {
    double scale = 1.0;
};

// Randomized schedule for an unknown number of solutions (possibly zero).
// Gives up with succeeded = false once the next round would exceed the budget.
SearchReport bbht_search(MarkingOracle& oracle, Rng& rng, const BbhtOptions& options = {});
SearchReport bbht_search(MarkingOracle& oracle, Rng& rng, const BbhtOptions& options, BbhtSchedule& schedule);

struct ExistenceOptions {
    double round_budget_factor = 3.0;  // per-round budget c * sqrt(N) total queries
    double growth = 1.2;
};

// One-sided test "is any index marked?": true is always verified.
bool existence_test(MarkingOracle& oracle, Rng& rng, std::size_t confidence_rounds,
                    const ExistenceOptions& options = {});

struct MaxSearchOptions {
    double round_budget_factor = 1.5;  // per threshold round, times sqrt(N) total queries
    std::size_t stop_after_failures = 3;
    double growth = 1.2;
    bool warm_start_schedule = true;
    Tolerances tol = kDefaultTolerances;
};

using ScoreFunction = std::function<double(std::uint64_t)>;

// Threshold search for argmax of score over [0, 2^n). The score is tabulated
// once to build each round's diagonal oracle (simulation cost, not counted);
// the report's verification_queries counts classical score evaluations of
// measured indices plus the initial random sample. found is always set.
SearchReport maximum_search(const ScoreFunction& score, std::size_t n_qubits, Rng& rng,
                            const MaxSearchOptions& options = {});
// Same search over an already tabulated score vector (size must be 2^n).
SearchReport maximum_search(std::span<const double> scores, Rng& rng, const MaxSearchOptions& options = {});

}  // namespace qmud
