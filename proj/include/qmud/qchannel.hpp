#pragma once

// Bit-flip channel, classical vs. single-qubit phase-basis transmission.
//
// Encoding: 0 -> |+> = (|0>+|1>)/sqrt2, 1 -> |-> = (|0>-|1>)/sqrt2. Both are
// eigenvectors of X (eigenvalues +1 and -1), so a flip only adds a global
// phase and a Hadamard-basis readout recovers the bit for every p.

#include "qmud/random.hpp"

#include <cstdint>

namespace qmud {

class FlipChannel {
public:
    explicit FlipChannel(double p);
    double p() const noexcept { return p_; }

private:
    double p_;
};

// H2(p) in bits, with 0 log 0 := 0.
double binary_entropy(double p);
// 1 - H2(p).
double bsc_capacity(double p);

int transmit_classical(int bit, const FlipChannel& channel, Rng& rng);
int transmit_quantum(int bit, const FlipChannel& channel, Rng& rng);

struct DemoReport {
    std::uint64_t n_bits = 0;
    double p = 0.0;
    std::uint64_t classical_errors = 0;
    std::uint64_t quantum_errors = 0;
    double classical_error_rate = 0.0;
    double quantum_error_rate = 0.0;
    double classical_capacity = 0.0;
};

DemoReport run_demo(std::uint64_t n_bits, double p, Rng& rng);

}  // namespace qmud
