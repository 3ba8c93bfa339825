#include "qmud/qchannel.hpp"

#include "qmud/errors.hpp"
#include "qmud/qcore.hpp"

#include <cmath>
#include <string>

namespace qmud {
namespace {

void check_bit(int bit)
{
    if (bit != 0 && bit != 1) {
        throw DomainError("bit must be 0 or 1, got " + std::to_string(bit));
    }
}

void check_probability(double p)
{
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("flip probability " + std::to_string(p) + " outside [0, 1]");
    }
}

bool flips(const FlipChannel& channel, Rng& rng)
{
    return uniform01(rng) < channel.p();
}

}  // namespace

FlipChannel::FlipChannel(double p) : p_(p)
{
    check_probability(p);
}

double binary_entropy(double p)
{
    check_probability(p);
    const auto term = [](double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; };
    return term(p) + term(1.0 - p);
}

double bsc_capacity(double p)
{
    return 1.0 - binary_entropy(p);
}

int transmit_classical(int bit, const FlipChannel& channel, Rng& rng)
{
    check_bit(bit);
    return flips(channel, rng) ? 1 - bit : bit;
}

int transmit_quantum(int bit, const FlipChannel& channel, Rng& rng)
{
    check_bit(bit);
    static const UnitaryOp hadamard = UnitaryOp::single_qubit(1, 0, gates::hadamard());
    static const UnitaryOp flip = UnitaryOp::single_qubit(1, 0, gates::pauli_x());

    StateVector qubit = apply_unitary(hadamard, StateVector::basis(1, static_cast<std::uint64_t>(bit)));
    if (flips(channel, rng)) {
        qubit = apply_unitary(flip, qubit);
    }
    const auto readout = measure(apply_unitary(hadamard, qubit), rng);
    return static_cast<int>(readout.outcome);
}

DemoReport run_demo(std::uint64_t n_bits, double p, Rng& rng)
{
    if (n_bits < 1) {
        throw DomainError("demo needs at least one bit");
    }
    const FlipChannel channel(p);
    DemoReport report;
    report.n_bits = n_bits;
    report.p = p;
    for (std::uint64_t i = 0; i < n_bits; ++i) {
        const int bit = static_cast<int>(rng() >> 63);
        report.classical_errors += transmit_classical(bit, channel, rng) != bit;
        report.quantum_errors += transmit_quantum(bit, channel, rng) != bit;
    }
    const auto n = static_cast<double>(n_bits);
    report.classical_error_rate = static_cast<double>(report.classical_errors) / n;
    report.quantum_error_rate = static_cast<double>(report.quantum_errors) / n;
    report.classical_capacity = bsc_capacity(p);
    return report;
}

}  // namespace qmud
