#pragma once

#include <cstddef>

namespace qmud {

// Numerical limits shared by the simulator. One record so tests and
// callers agree on what "normalized" or "unitary" means.
struct Tolerances {
    double norm = 1e-10;           // |sum |amp|^2 - 1|
    double unitarity = 1e-9;       // ||U^H U - I||_F for dense operators
    double product_state = 1e-9;   // |a00 a11 - a01 a10| for the 2-qubit test
    std::size_t max_qubits = 24;   // 2^24 amplitudes = 256 MiB of complex<double>
    std::size_t max_dense_dim = 1u << 10;
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace qmud
