#pragma once

// Ideal state-vector simulator: registers, unitaries, computational-basis
// measurement, tensor composition and the two-qubit product-state test.
//
// Qubit k is bit k of the basis-state index (qubit 0 least significant).

#include "qmud/random.hpp"
#include "qmud/tolerances.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace qmud {

using Complex = std::complex<double>;

class StateVector {
public:
    // Validates length (power of two, within max_qubits) and unit norm.
    static StateVector from_amplitudes(std::vector<Complex> amplitudes,
                                       const Tolerances& tol = kDefaultTolerances);
    // |index> on an n-qubit register.
    static StateVector basis(std::size_t n_qubits, std::uint64_t index,
                             const Tolerances& tol = kDefaultTolerances);

    std::size_t n_qubits() const noexcept { return n_qubits_; }
    std::size_t dimension() const noexcept { return amplitudes_.size(); }
    std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    Complex operator[](std::uint64_t i) const { return amplitudes_[i]; }
    double norm_squared() const noexcept;

private:
    StateVector(std::size_t n_qubits, std::vector<Complex> amplitudes)
        : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {}

    // Bypasses the norm check for internal kernels that preserve it by construction.
    static StateVector adopt(std::size_t n_qubits, std::vector<Complex> amplitudes)
    {
        return StateVector(n_qubits, std::move(amplitudes));
    }

    friend struct StateAccess;

    std::size_t n_qubits_;
    std::vector<Complex> amplitudes_;
};

using Gate2x2 = std::array<Complex, 4>;  // row-major {u00, u01, u10, u11}

namespace gates {
Gate2x2 identity();
Gate2x2 hadamard();
Gate2x2 pauli_x();
Gate2x2 pauli_z();
Gate2x2 phase(double radians);
}  // namespace gates

// A unitary acting on a whole register. Dense matrices are capped at
// max_dense_dim; larger transforms use a diagonal or wire-local form.
class UnitaryOp {
public:
    struct Dense {
        std::size_t dim;
        std::vector<Complex> entries;  // row-major dim x dim
    };
    struct Diagonal {
        std::vector<Complex> phases;  // unit-modulus entries
    };
    struct WireLocal {
        std::size_t n_qubits;
        std::size_t wire;
        Gate2x2 gate;
    };

    static UnitaryOp dense(std::size_t dim, std::vector<Complex> entries,
                           const Tolerances& tol = kDefaultTolerances);
    static UnitaryOp diagonal(std::vector<Complex> phases,
                              const Tolerances& tol = kDefaultTolerances);
    static UnitaryOp single_qubit(std::size_t n_qubits, std::size_t wire, const Gate2x2& gate,
                                  const Tolerances& tol = kDefaultTolerances);

    std::size_t dimension() const noexcept;
    const std::variant<Dense, Diagonal, WireLocal>& form() const noexcept { return form_; }

    // Dense matrix of this operator; only for dimension <= max_dense_dim.
    std::vector<Complex> to_dense(const Tolerances& tol = kDefaultTolerances) const;

private:
    explicit UnitaryOp(std::variant<Dense, Diagonal, WireLocal> form) : form_(std::move(form)) {}
    std::variant<Dense, Diagonal, WireLocal> form_;
};

struct MeasurementOutcome {
    std::uint64_t outcome;
    StateVector post_state;
};

// Frobenius norm of U^H U - I for a row-major dim x dim matrix.
double unitarity_defect(std::size_t dim, std::span<const Complex> entries);

StateVector uniform_superposition(std::size_t n_qubits, const Tolerances& tol = kDefaultTolerances);
StateVector apply_unitary(const UnitaryOp& u, const StateVector& s);
// Applies gate to every wire in turn (e.g. H^{\otimes n}).
StateVector apply_to_all_wires(const Gate2x2& gate, const StateVector& s);
StateVector tensor(const StateVector& a, const StateVector& b, const Tolerances& tol = kDefaultTolerances);
std::vector<double> probabilities(const StateVector& s);
// Draws a basis index with probability |amp|^2 without building the post state.
std::uint64_t sample_outcome(std::span<const Complex> amplitudes, Rng& rng);
MeasurementOutcome measure(const StateVector& s, Rng& rng);
bool is_product_2qubit(const StateVector& s, const Tolerances& tol = kDefaultTolerances);

// Internal hook for kernels (Grover) that evolve amplitudes in place and hand
// back a StateVector without re-validating the norm each step.
struct StateAccess {
    static StateVector adopt(std::size_t n_qubits, std::vector<Complex> amplitudes)
    {
        return StateVector::adopt(n_qubits, std::move(amplitudes));
    }
    static std::vector<Complex> release(StateVector&& s) { return std::move(s.amplitudes_); }
};

}  // namespace qmud
