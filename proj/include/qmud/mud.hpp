#pragma once

// Multi-user detection over the 2^K hypothesis space: hypothesis indexing,
// likelihood cost functions, matched-filter / exhaustive ML / quantum-assisted
// detectors and the Monte-Carlo BER harness.

#include "qmud/cdma.hpp"
#include "qmud/qsearch.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace qmud {

// bits[k] = +1 iff bit k of index is 0 (user k = bit k).
struct Hypothesis {
    BitVector bits;
    std::uint64_t index = 0;
};

Hypothesis hypothesis_from_index(std::uint64_t index, std::size_t users);
std::uint64_t index_from_bits(std::span<const int> bits);

enum class CostKind { mls_chip, mls_mf, empirical };

std::string to_string(CostKind kind);
CostKind parse_cost_kind(const std::string& text);

// Higher score = more likely hypothesis. evaluate() is counted; peek() is the
// uncounted path a simulator uses to tabulate a diagonal oracle.
class CostFunction {
public:
    using Evaluator = std::function<double(std::uint64_t)>;

    CostFunction(CostKind kind, std::size_t users, Evaluator evaluator);

    double evaluate(std::uint64_t index);
    double peek(std::uint64_t index) const;

    CostKind kind() const noexcept { return kind_; }
    std::size_t users() const noexcept { return users_; }
    std::uint64_t hypotheses() const noexcept { return std::uint64_t{1} << users_; }
    std::uint64_t evaluations() const noexcept { return evaluations_; }

private:
    CostKind kind_;
    std::size_t users_;
    Evaluator evaluator_;
    std::uint64_t evaluations_ = 0;
};

// -||r - r_hat(b_m)||^2 over the chips (mls_chip) or -||y - w(b_m)||^2 over
// the matched-filter outputs (mls_mf). Reconstructions use frame.prev_bits.
double mls_cost(const ReceivedFrame& frame, const CdmaScenario& scenario, const ChannelState& channel,
                std::uint64_t index, CostKind kind = CostKind::mls_chip);

// Precomputes per-user reconstructions so each evaluation is O(K * N_c).
CostFunction make_mls_cost(const ReceivedFrame& frame, const CdmaScenario& scenario, const ChannelState& channel,
                           CostKind kind = CostKind::mls_chip);

// Uniform grid over [-half_width, half_width] on each real dimension of y.
struct QuantizationGrid {
    std::size_t cells_per_dim = 9;
    double half_width = 1.0;

    // Default g = 1 + 3 sigma for the scenario's noise level.
    static QuantizationGrid for_noise(double noise_variance, std::size_t cells_per_dim = 9);
    // Cell index per real dimension (re, im interleaved); empty if outside the grid.
    std::vector<std::size_t> cell_of(std::span<const Complex> y) const;
};

// Relative frequency with which b_m lands in y_observed's cell, over n_mc
// channel (drawn from the scenario's channel model) and noise realizations.
double empirical_cost(const CdmaScenario& scenario, const MfOutputs& y_observed, std::uint64_t index,
                      std::size_t n_mc, Rng& rng, const QuantizationGrid& grid, std::span<const int> prev_bits = {});

// Deterministic CostFunction: hypothesis m uses its own stream derived from seed.
CostFunction make_empirical_cost(const CdmaScenario& scenario, const MfOutputs& y_observed, std::size_t n_mc,
                                 std::uint64_t seed, const QuantizationGrid& grid);

struct DetectionReport {
    BitVector detected_bits;
    std::uint64_t detected_index = 0;
    std::uint64_t cf_evaluations = 0;
    std::uint64_t grover_queries = 0;
    std::uint64_t threshold_rounds = 0;
    bool tie_degenerate = false;  // the chosen score is shared by other hypotheses
    bool correct = false;

    // Quantum oracle applications plus classical CF evaluations.
    std::uint64_t oracle_applications() const noexcept { return grover_queries + cf_evaluations; }
};

// Sets report.correct and returns the number of bit errors.
std::size_t grade(DetectionReport& report, std::span<const int> true_bits);

DetectionReport mf_detect(const MfOutputs& y, const ChannelState& channel);

inline constexpr std::size_t kMaxExhaustiveUsers = 20;
DetectionReport exhaustive_ml_detect(CostFunction& cf, std::size_t users);

DetectionReport qmud_detect(CostFunction& cf, std::size_t users, Rng& rng, const MaxSearchOptions& options = {});

enum class DetectorKind { mf, ml_exhaustive, qmud };

std::string to_string(DetectorKind kind);
DetectorKind parse_detector_kind(const std::string& text);

struct BerPoint {
    double ebn0_db = 0.0;  // +inf means a noiseless point
    double ber = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t bit_errors = 0;
    double mean_cf_evaluations = 0.0;
    double mean_grover_queries = 0.0;
};

struct BerCurve {
    std::vector<BerPoint> points;
};

struct BerSweepOptions {
    DetectorKind detector = DetectorKind::ml_exhaustive;
    CostKind cost = CostKind::mls_chip;
    std::vector<double> ebn0_db;
    std::uint64_t trials = 1000;
    std::uint64_t seed = kDefaultSeed;
    std::size_t threads = 1;
    MaxSearchOptions qmud;
    // empirical cost only
    std::size_t empirical_mc = 2000;
    std::size_t empirical_cells = 9;
};

// Each trial draws channel, bits, previous bits and noise from a stream
// derived from (seed, point, trial); results do not depend on thread count.
BerCurve ber_sweep(const CdmaScenario& scenario_template, const BerSweepOptions& options);

// Header "ebn0_db,ber,trials,mean_cf_evals,mean_grover_queries".
void write_ber_csv(std::ostream& os, const BerCurve& curve);

}  // namespace qmud
