#pragma once

// Discrete-time complex-baseband DS-CDMA uplink: chip-rate signatures,
// per-user flat channels with integer chip delays, received-frame synthesis
// and the matched-filter bank.

#include "qmud/random.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace qmud {

using Complex = std::complex<double>;
// Bipolar symbols, each entry +1 or -1.
using BitVector = std::vector<int>;

enum class SignatureKind { walsh, random_bipolar };
enum class SyncMode { synchronous, chip_asynchronous };
enum class GainModel { fixed, rayleigh };

std::string to_string(SignatureKind kind);
std::string to_string(SyncMode mode);
std::string to_string(GainModel model);
SignatureKind parse_signature_kind(const std::string& text);
SyncMode parse_sync_mode(const std::string& text);
GainModel parse_gain_model(const std::string& text);

// Unit-energy chip sequence of one user; chips are +-1/sqrt(N_c).
struct Signature {
    std::size_t user = 0;
    std::vector<double> chips;
};

std::vector<Signature> generate_signatures(SignatureKind kind, std::size_t users, std::size_t chips,
                                           std::uint64_t seed);

struct UserChannel {
    double amplitude = 1.0;  // A_k >= 0
    double phase = 0.0;      // alpha_k in [0, 2 pi)
    std::size_t delay = 0;   // tau_k in chips, [0, N_c)

    Complex coefficient() const { return std::polar(amplitude, phase); }
};

struct ChannelState {
    std::vector<UserChannel> users;
};

struct ScenarioParams {
    std::size_t users = 1;   // K
    std::size_t chips = 8;   // N_c
    SignatureKind signature = SignatureKind::walsh;
    SyncMode sync = SyncMode::synchronous;
    GainModel gain = GainModel::fixed;
    double noise_variance = 0.0;  // sigma^2 per complex chip sample
    std::uint64_t seed = kDefaultSeed;
};

class CdmaScenario {
public:
    // Generates signatures from params.signature / params.seed.
    explicit CdmaScenario(const ScenarioParams& params);
    // Explicit signatures (must be K sequences of N_c unit-energy chips).
    CdmaScenario(const ScenarioParams& params, std::vector<Signature> signatures);

    const ScenarioParams& params() const noexcept { return params_; }
    std::size_t users() const noexcept { return params_.users; }
    std::size_t chips() const noexcept { return params_.chips; }
    double noise_variance() const noexcept { return params_.noise_variance; }
    const std::vector<Signature>& signatures() const noexcept { return signatures_; }

    // Same codes and channel model, different noise level.
    CdmaScenario with_noise_variance(double sigma2) const;

    // Gram matrix of the signatures, row-major K x K.
    std::vector<double> gram() const;

private:
    ScenarioParams params_;
    std::vector<Signature> signatures_;
};

void validate(const ScenarioParams& params);
// validate(params), then generate_signatures with the params' kind and seed.
std::vector<Signature> signatures_for(const ScenarioParams& params);

// sigma^2 = N0 for unit bit energy (E[A^2] = 1, unit-energy signature).
double noise_variance_for_ebn0_db(double ebn0_db);

ChannelState sample_channel(const CdmaScenario& scenario, Rng& rng);
// All users a_k = 1, tau_k = 0.
ChannelState unit_channel(std::size_t users);

struct ReceivedFrame {
    std::vector<Complex> samples;  // N_c chip-rate samples of one symbol window
    BitVector true_bits;           // scoring only
    BitVector prev_bits;           // previous symbol, known to the receiver
};

// Noise-free part of the received window for the given symbols.
std::vector<Complex> noiseless_samples(const CdmaScenario& scenario, const ChannelState& channel,
                                       std::span<const int> bits, std::span<const int> prev_bits);

ReceivedFrame synthesize_received(const CdmaScenario& scenario, const ChannelState& channel,
                                  std::span<const int> bits, std::span<const int> prev_bits, Rng& rng);

struct MfOutputs {
    std::vector<Complex> y;  // one correlator output per user
};

MfOutputs matched_filter_bank(std::span<const Complex> samples, const CdmaScenario& scenario,
                              const ChannelState& channel);
MfOutputs matched_filter_bank(const ReceivedFrame& frame, const CdmaScenario& scenario,
                              const ChannelState& channel);

BitVector random_bits(std::size_t count, Rng& rng);

// Debug export: header "t,re,im" then one line per chip.
void write_frame_csv(std::ostream& os, const ReceivedFrame& frame);

}  // namespace qmud
