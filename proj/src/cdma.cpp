#include "qmud/cdma.hpp"

#include "qmud/errors.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

namespace qmud {
namespace {

void check_symbols(std::span<const int> bits, std::size_t users, const char* what)
{
    if (bits.size() != users) {
        throw ShapeError(std::string(what) + " has length " + std::to_string(bits.size()) + ", expected " +
                         std::to_string(users));
    }
    for (const int b : bits) {
        if (b != 1 && b != -1) {
            throw DomainError(std::string(what) + " entries must be +1 or -1");
        }
    }
}

void check_channel(const ChannelState& channel, const CdmaScenario& scenario)
{
    if (channel.users.size() != scenario.users()) {
        throw ShapeError("channel describes " + std::to_string(channel.users.size()) + " users, scenario has " +
                         std::to_string(scenario.users()));
    }
    for (const auto& u : channel.users) {
        if (u.delay >= scenario.chips()) {
            throw DomainError("delay " + std::to_string(u.delay) + " outside [0, N_c)");
        }
        if (!std::isfinite(u.amplitude) || !std::isfinite(u.phase)) {
            throw DomainError("channel coefficient is not finite");
        }
    }
}

}  // namespace

std::vector<Signature> signatures_for(const ScenarioParams& params)
{
    validate(params);
    return generate_signatures(params.signature, params.users, params.chips, params.seed);
}

std::string to_string(SignatureKind kind)
{
    return kind == SignatureKind::walsh ? "walsh" : "random_bipolar";
}

std::string to_string(SyncMode mode)
{
    return mode == SyncMode::synchronous ? "synchronous" : "asynchronous";
}

std::string to_string(GainModel model)
{
    return model == GainModel::fixed ? "fixed" : "rayleigh";
}

SignatureKind parse_signature_kind(const std::string& text)
{
    if (text == "walsh") return SignatureKind::walsh;
    if (text == "random_bipolar" || text == "random") return SignatureKind::random_bipolar;
    throw ConfigError("unknown signature kind '" + text + "' (walsh | random_bipolar)");
}

SyncMode parse_sync_mode(const std::string& text)
{
    if (text == "synchronous" || text == "sync") return SyncMode::synchronous;
    if (text == "asynchronous" || text == "async") return SyncMode::chip_asynchronous;
    throw ConfigError("unknown sync mode '" + text + "' (synchronous | asynchronous)");
}

GainModel parse_gain_model(const std::string& text)
{
    if (text == "fixed") return GainModel::fixed;
    if (text == "rayleigh") return GainModel::rayleigh;
    throw ConfigError("unknown gain model '" + text + "' (fixed | rayleigh)");
}

std::vector<Signature> generate_signatures(SignatureKind kind, std::size_t users, std::size_t chips,
                                           std::uint64_t seed)
{
    if (users < 1 || chips < 1) {
        throw ConfigError("need K >= 1 users and N_c >= 1 chips");
    }
    const double level = 1.0 / std::sqrt(static_cast<double>(chips));
    std::vector<Signature> out(users);
    if (kind == SignatureKind::walsh) {
        if (!std::has_single_bit(chips)) {
            throw ConfigError("walsh signatures need a power-of-two N_c, got " + std::to_string(chips));
        }
        if (users > chips) {
            throw ConfigError("walsh signatures support at most N_c = " + std::to_string(chips) + " users, got K = " +
                              std::to_string(users));
        }
        // Sylvester-Hadamard row r: chip t = (-1)^popcount(r & t).
        for (std::size_t k = 0; k < users; ++k) {
            out[k].user = k;
            out[k].chips.resize(chips);
            for (std::size_t t = 0; t < chips; ++t) {
                out[k].chips[t] = (std::popcount(k & t) % 2 == 0) ? level : -level;
            }
        }
        return out;
    }
    Rng rng = make_rng(seed, 0x5167);
    for (std::size_t k = 0; k < users; ++k) {
        out[k].user = k;
        out[k].chips.resize(chips);
        for (auto& c : out[k].chips) {
            c = (rng() & 1u) ? level : -level;
        }
    }
    return out;
}

void validate(const ScenarioParams& params)
{
    if (params.users < 1) {
        throw ConfigError("K must be >= 1");
    }
    if (params.chips < 1) {
        throw ConfigError("N_c must be >= 1");
    }
    if (params.signature == SignatureKind::walsh) {
        if (!std::has_single_bit(params.chips)) {
            throw ConfigError("walsh signatures need a power-of-two N_c, got " + std::to_string(params.chips));
        }
        if (params.users > params.chips) {
            throw ConfigError("walsh signatures need K <= N_c (K = " + std::to_string(params.users) +
                              ", N_c = " + std::to_string(params.chips) + ")");
        }
    }
    if (!(params.noise_variance >= 0.0) || !std::isfinite(params.noise_variance)) {
        throw ConfigError("noise variance must be finite and >= 0");
    }
}

CdmaScenario::CdmaScenario(const ScenarioParams& params)
    : CdmaScenario(params, signatures_for(params))
{
}

CdmaScenario::CdmaScenario(const ScenarioParams& params, std::vector<Signature> signatures)
    : params_(params), signatures_(std::move(signatures))
{
    if (params.users < 1 || params.chips < 1) {
        throw ConfigError("need K >= 1 users and N_c >= 1 chips");
    }
    if (!(params.noise_variance >= 0.0) || !std::isfinite(params.noise_variance)) {
        throw ConfigError("noise variance must be finite and >= 0");
    }
    if (signatures_.size() != params.users) {
        throw ShapeError("got " + std::to_string(signatures_.size()) + " signatures for K = " +
                         std::to_string(params.users));
    }
    for (const auto& s : signatures_) {
        if (s.chips.size() != params.chips) {
            throw ShapeError("signature length " + std::to_string(s.chips.size()) + " differs from N_c = " +
                             std::to_string(params.chips));
        }
        double energy = 0.0;
        for (const double c : s.chips) {
            energy += c * c;
        }
        if (std::abs(energy - 1.0) > 1e-12) {
            throw DomainError("signature energy " + std::to_string(energy) + " is not 1");
        }
    }
}

CdmaScenario CdmaScenario::with_noise_variance(double sigma2) const
{
    ScenarioParams p = params_;
    p.noise_variance = sigma2;
    return CdmaScenario(p, signatures_);
}

std::vector<double> CdmaScenario::gram() const
{
    const std::size_t k = users();
    std::vector<double> g(k * k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < chips(); ++t) {
                acc += signatures_[i].chips[t] * signatures_[j].chips[t];
            }
            g[i * k + j] = acc;
        }
    }
    return g;
}

double noise_variance_for_ebn0_db(double ebn0_db)
{
    if (std::isinf(ebn0_db) && ebn0_db > 0) {
        return 0.0;
    }
    return std::pow(10.0, -ebn0_db / 10.0);
}

ChannelState sample_channel(const CdmaScenario& scenario, Rng& rng)
{
    ChannelState ch;
    ch.users.resize(scenario.users());
    for (auto& u : ch.users) {
        if (scenario.params().gain == GainModel::rayleigh) {
            // A^2 ~ Exp(1), so E[A^2] = 1.
            u.amplitude = std::sqrt(-std::log(1.0 - uniform01(rng)));
            u.phase = 2.0 * std::numbers::pi * uniform01(rng);
        }
        if (scenario.params().sync == SyncMode::chip_asynchronous) {
            u.delay = static_cast<std::size_t>(uniform_index(rng, scenario.chips()));
        }
    }
    return ch;
}

ChannelState unit_channel(std::size_t users)
{
    return ChannelState{std::vector<UserChannel>(users)};
}

std::vector<Complex> noiseless_samples(const CdmaScenario& scenario, const ChannelState& channel,
                                       std::span<const int> bits, std::span<const int> prev_bits)
{
    check_symbols(bits, scenario.users(), "bits");
    check_symbols(prev_bits, scenario.users(), "prev_bits");
    check_channel(channel, scenario);
    const std::size_t nc = scenario.chips();
    std::vector<Complex> out(nc);
    for (std::size_t k = 0; k < scenario.users(); ++k) {
        const Complex a = channel.users[k].coefficient();
        const std::size_t tau = channel.users[k].delay;
        const auto& s = scenario.signatures()[k].chips;
        // Tail of the previous symbol occupies chips [0, tau).
        for (std::size_t t = 0; t < tau; ++t) {
            out[t] += a * static_cast<double>(prev_bits[k]) * s[t - tau + nc];
        }
        for (std::size_t t = tau; t < nc; ++t) {
            out[t] += a * static_cast<double>(bits[k]) * s[t - tau];
        }
    }
    return out;
}

ReceivedFrame synthesize_received(const CdmaScenario& scenario, const ChannelState& channel,
                                  std::span<const int> bits, std::span<const int> prev_bits, Rng& rng)
{
    ReceivedFrame frame;
    frame.samples = noiseless_samples(scenario, channel, bits, prev_bits);
    frame.true_bits.assign(bits.begin(), bits.end());
    frame.prev_bits.assign(prev_bits.begin(), prev_bits.end());
    const double sigma2 = scenario.noise_variance();
    if (sigma2 > 0.0) {
        for (auto& x : frame.samples) {
            x += complex_normal(rng, sigma2);
        }
    }
    return frame;
}

MfOutputs matched_filter_bank(std::span<const Complex> samples, const CdmaScenario& scenario,
                              const ChannelState& channel)
{
    if (samples.size() != scenario.chips()) {
        throw ShapeError("frame has " + std::to_string(samples.size()) + " samples, expected N_c = " +
                         std::to_string(scenario.chips()));
    }
    check_channel(channel, scenario);
    MfOutputs mf;
    mf.y.resize(scenario.users());
    for (std::size_t k = 0; k < scenario.users(); ++k) {
        const std::size_t tau = channel.users[k].delay;
        const auto& s = scenario.signatures()[k].chips;
        Complex acc = 0.0;
        for (std::size_t t = tau; t < samples.size(); ++t) {
            acc += samples[t] * s[t - tau];
        }
        mf.y[k] = acc;
    }
    return mf;
}

MfOutputs matched_filter_bank(const ReceivedFrame& frame, const CdmaScenario& scenario, const ChannelState& channel)
{
    return matched_filter_bank(frame.samples, scenario, channel);
}

BitVector random_bits(std::size_t count, Rng& rng)
{
    BitVector b(count);
    for (auto& x : b) {
        x = (rng() >> 63) ? -1 : 1;
    }
    return b;
}

void write_frame_csv(std::ostream& os, const ReceivedFrame& frame)
{
    const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
    os << "t,re,im\n";
    for (std::size_t t = 0; t < frame.samples.size(); ++t) {
        os << t << ',' << frame.samples[t].real() << ',' << frame.samples[t].imag() << '\n';
    }
    os.precision(old_precision);
}

}  // namespace qmud
