#include "doctest.h"
#include "oracles.hpp"

#include "qmud/cdma.hpp"
#include "qmud/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace qmud;

namespace {

// Two consecutive symbols laid out on a 3 N_c chip stream; the receiver
// window is [N_c, 2 N_c).
std::vector<Complex> window_from_stream(const CdmaScenario& sc, const ChannelState& ch, const BitVector& bits,
                                        const BitVector& prev)
{
    const std::size_t nc = sc.chips();
    std::vector<Complex> stream(3 * nc);
    for (std::size_t k = 0; k < sc.users(); ++k) {
        const auto a = std::polar(ch.users[k].amplitude, ch.users[k].phase);
        for (std::size_t c = 0; c < nc; ++c) {
            const double chip = sc.signatures()[k].chips[c];
            stream[ch.users[k].delay + c] += a * double(prev[k]) * chip;
            stream[nc + ch.users[k].delay + c] += a * double(bits[k]) * chip;
        }
    }
    return {stream.begin() + nc, stream.begin() + 2 * nc};
}

}  // namespace

TEST_CASE("walsh codes are orthonormal")
{
    for (std::size_t nc : {1u, 2u, 4u, 8u, 32u}) {
        ScenarioParams p;
        p.users = nc;
        p.chips = nc;
        const CdmaScenario sc(p);
        const auto g = sc.gram();
        for (std::size_t i = 0; i < nc; ++i)
            for (std::size_t j = 0; j < nc; ++j) CHECK(g[i * nc + j] == doctest::Approx(i == j ? 1.0 : 0.0));
    }
}

TEST_CASE("random bipolar codes")
{
    const auto a = generate_signatures(SignatureKind::random_bipolar, 4, 16, 99);
    const auto b = generate_signatures(SignatureKind::random_bipolar, 4, 16, 99);
    const auto c = generate_signatures(SignatureKind::random_bipolar, 4, 16, 100);
    bool differs = false;
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(a[k].chips == b[k].chips);
        differs |= (a[k].chips != c[k].chips);
        double e = 0.0;
        for (double x : a[k].chips) {
            CHECK(std::abs(std::abs(x) - 0.25) < 1e-15);
            e += x * x;
        }
        CHECK(e == doctest::Approx(1.0));
    }
    CHECK(differs);
}

TEST_CASE("scenario validation")
{
    ScenarioParams p;
    p.users = 5;
    p.chips = 4;
    CHECK_THROWS_AS(CdmaScenario{p}, ConfigError);
    p.users = 2;
    p.chips = 6;
    CHECK_THROWS_AS(CdmaScenario{p}, ConfigError);
    p.signature = SignatureKind::random_bipolar;
    CHECK_NOTHROW(CdmaScenario{p});
    p.noise_variance = -1.0;
    CHECK_THROWS_AS(CdmaScenario{p}, ConfigError);

    ScenarioParams q;
    q.users = 2;
    q.chips = 2;
    CHECK_THROWS_AS(CdmaScenario(q, {Signature{0, {1.0, 0.0}}}), ShapeError);
    CHECK_THROWS_AS(CdmaScenario(q, {Signature{0, {1.0, 0.0}}, Signature{1, {1.0, 1.0}}}), DomainError);

    CHECK(parse_signature_kind("walsh") == SignatureKind::walsh);
    CHECK(parse_sync_mode("asynchronous") == SyncMode::chip_asynchronous);
    CHECK(parse_gain_model("rayleigh") == GainModel::rayleigh);
    CHECK_THROWS_AS(parse_gain_model("ricean"), ConfigError);
    CHECK(parse_sync_mode(to_string(SyncMode::chip_asynchronous)) == SyncMode::chip_asynchronous);
}

TEST_CASE("Eb/N0 to noise variance")
{
    CHECK(noise_variance_for_ebn0_db(0.0) == doctest::Approx(1.0));
    CHECK(noise_variance_for_ebn0_db(10.0) == doctest::Approx(0.1));
    CHECK(noise_variance_for_ebn0_db(3.0) == doctest::Approx(0.50118723));
    CHECK(noise_variance_for_ebn0_db(INFINITY) == 0.0);
}

TEST_CASE("synthesis matches a two-symbol chip stream")
{
    Rng rng = make_rng(8);
    ScenarioParams p;
    p.users = 5;
    p.chips = 16;
    p.signature = SignatureKind::random_bipolar;
    p.sync = SyncMode::chip_asynchronous;
    p.gain = GainModel::rayleigh;
    const CdmaScenario sc(p);
    for (int trial = 0; trial < 200; ++trial) {
        const auto ch = sample_channel(sc, rng);
        const auto bits = random_bits(5, rng);
        const auto prev = random_bits(5, rng);
        const auto got = noiseless_samples(sc, ch, bits, prev);
        CHECK(oracle::max_abs_diff(got, window_from_stream(sc, ch, bits, prev)) < 1e-12);
    }
}

TEST_CASE("matched filter bank for a hand-computed Walsh frame")
{
    ScenarioParams p;
    p.users = 2;
    p.chips = 2;
    const CdmaScenario sc(p);
    const auto ch = unit_channel(2);
    const BitVector bits{1, -1};
    const auto samples = noiseless_samples(sc, ch, bits, bits);
    CHECK(std::abs(samples[0]) < 1e-15);
    CHECK(samples[1].real() == doctest::Approx(std::numbers::sqrt2));

    const auto y = matched_filter_bank(samples, sc, ch).y;
    CHECK(y[0].real() == doctest::Approx(1.0));
    CHECK(y[1].real() == doctest::Approx(-1.0));
}

TEST_CASE("synchronous matched filter equals R A b")
{
    Rng rng = make_rng(9);
    ScenarioParams p;
    p.users = 4;
    p.chips = 8;
    p.signature = SignatureKind::random_bipolar;
    p.gain = GainModel::rayleigh;
    const CdmaScenario sc(p);
    const auto r = sc.gram();
    for (int trial = 0; trial < 50; ++trial) {
        const auto ch = sample_channel(sc, rng);
        const auto bits = random_bits(4, rng);
        const auto y = matched_filter_bank(noiseless_samples(sc, ch, bits, bits), sc, ch).y;
        for (std::size_t i = 0; i < 4; ++i) {
            Complex expect = 0.0;
            for (std::size_t j = 0; j < 4; ++j) expect += r[i * 4 + j] * ch.users[j].coefficient() * double(bits[j]);
            CHECK(std::abs(y[i] - expect) < 1e-12);
        }
    }
}

TEST_CASE("noise has the configured variance")
{
    Rng rng = make_rng(10);
    ScenarioParams p;
    p.users = 1;
    p.chips = 4;
    p.noise_variance = 0.3;
    const CdmaScenario sc(p);
    const auto ch = unit_channel(1);
    const BitVector b{1};
    const auto clean = noiseless_samples(sc, ch, b, b);
    double power = 0.0;
    double re2 = 0.0;
    const int frames = 50000;
    for (int i = 0; i < frames; ++i) {
        const auto f = synthesize_received(sc, ch, b, b, rng);
        for (std::size_t t = 0; t < 4; ++t) {
            const auto z = f.samples[t] - clean[t];
            power += std::norm(z);
            re2 += z.real() * z.real();
        }
    }
    const double n = 4.0 * frames;
    CHECK(power / n == doctest::Approx(0.3).epsilon(0.01));
    CHECK(re2 / n == doctest::Approx(0.15).epsilon(0.015));
}

TEST_CASE("Rayleigh gains have unit mean power")
{
    Rng rng = make_rng(11);
    ScenarioParams p;
    p.users = 8;
    p.chips = 8;
    p.gain = GainModel::rayleigh;
    p.sync = SyncMode::chip_asynchronous;
    const CdmaScenario sc(p);
    double power = 0.0;
    std::vector<int> delay_hist(8);
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
        for (const auto& u : sample_channel(sc, rng).users) {
            power += u.amplitude * u.amplitude;
            CHECK(u.delay < 8);
            ++delay_hist[u.delay];
        }
    }
    CHECK(power / (8.0 * draws) == doctest::Approx(1.0).epsilon(0.02));
    for (int h : delay_hist) CHECK(std::abs(h - draws) < 5 * std::sqrt(draws));
}

TEST_CASE("symbol and channel checks")
{
    ScenarioParams p;
    p.users = 2;
    p.chips = 4;
    const CdmaScenario sc(p);
    const auto ch = unit_channel(2);
    CHECK_THROWS_AS(noiseless_samples(sc, ch, BitVector{1}, BitVector{1, 1}), ShapeError);
    CHECK_THROWS_AS(noiseless_samples(sc, ch, BitVector{1, 0}, BitVector{1, 1}), DomainError);
    auto far = ch;
    far.users[1].delay = 4;
    CHECK_THROWS_AS(noiseless_samples(sc, far, BitVector{1, 1}, BitVector{1, 1}), DomainError);
    CHECK_THROWS_AS(matched_filter_bank(std::vector<Complex>(3), sc, ch), ShapeError);
}

TEST_CASE("frame CSV export")
{
    ReceivedFrame f;
    f.samples = {Complex{1.0, -0.5}, Complex{0.0, 2.0}};
    std::ostringstream os;
    write_frame_csv(os, f);
    CHECK(os.str() == "t,re,im\n0,1,-0.5\n1,0,2\n");
}
