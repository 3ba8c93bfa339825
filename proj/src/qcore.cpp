#include "qmud/qcore.hpp"

#include "qmud/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace qmud {
namespace {

std::size_t checked_qubits_for_length(std::size_t length, const Tolerances& tol)
{
    if (length < 2 || !std::has_single_bit(length)) {
        throw ShapeError("amplitude count " + std::to_string(length) + " is not 2^n with n >= 1");
    }
    const auto n = static_cast<std::size_t>(std::countr_zero(length));
    if (n > tol.max_qubits) {
        throw SizeError("register of " + std::to_string(n) + " qubits exceeds maximum " +
                        std::to_string(tol.max_qubits));
    }
    return n;
}

void check_qubit_count(std::size_t n_qubits, const Tolerances& tol)
{
    if (n_qubits < 1 || n_qubits > tol.max_qubits) {
        throw SizeError("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                        std::to_string(tol.max_qubits) + "]");
    }
}

double sum_norm(std::span<const Complex> v)
{
    double acc = 0.0;
    for (const auto& a : v) {
        acc += std::norm(a);
    }
    return acc;
}

void check_gate(const Gate2x2& g, const Tolerances& tol)
{
    if (unitarity_defect(2, g) > tol.unitarity) {
        throw ValidationError("single-qubit gate is not unitary");
    }
}

// Applies a 2x2 gate to one wire in place.
void apply_wire(std::vector<Complex>& amps, std::size_t wire, const Gate2x2& g)
{
    const std::uint64_t stride = std::uint64_t{1} << wire;
    const std::uint64_t dim = amps.size();
    for (std::uint64_t base = 0; base < dim; base += 2 * stride) {
        for (std::uint64_t i = base; i < base + stride; ++i) {
            const Complex a0 = amps[i];
            const Complex a1 = amps[i + stride];
            amps[i] = g[0] * a0 + g[1] * a1;
            amps[i + stride] = g[2] * a0 + g[3] * a1;
        }
    }
}

}  // namespace

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes, const Tolerances& tol)
{
    const std::size_t n = checked_qubits_for_length(amplitudes.size(), tol);
    const double norm = sum_norm(amplitudes);
    if (std::abs(norm - 1.0) > tol.norm) {
        throw DomainError("state is not normalized: sum |amp|^2 = " + std::to_string(norm));
    }
    return StateVector(n, std::move(amplitudes));
}

StateVector StateVector::basis(std::size_t n_qubits, std::uint64_t index, const Tolerances& tol)
{
    check_qubit_count(n_qubits, tol);
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    if (index >= dim) {
        throw DomainError("basis index " + std::to_string(index) + " outside register of dimension " +
                          std::to_string(dim));
    }
    std::vector<Complex> amps(dim);
    amps[index] = 1.0;
    return StateVector(n_qubits, std::move(amps));
}

double StateVector::norm_squared() const noexcept
{
    return sum_norm(amplitudes_);
}

namespace gates {

Gate2x2 identity()
{
    return {1.0, 0.0, 0.0, 1.0};
}

Gate2x2 hadamard()
{
    const double r = std::numbers::sqrt2 / 2.0;
    return {r, r, r, -r};
}

Gate2x2 pauli_x()
{
    return {0.0, 1.0, 1.0, 0.0};
}

Gate2x2 pauli_z()
{
    return {1.0, 0.0, 0.0, -1.0};
}

Gate2x2 phase(double radians)
{
    return {1.0, 0.0, 0.0, std::polar(1.0, radians)};
}

}  // namespace gates

double unitarity_defect(std::size_t dim, std::span<const Complex> entries)
{
    if (entries.size() != dim * dim) {
        throw ShapeError("matrix has " + std::to_string(entries.size()) + " entries, expected " +
                         std::to_string(dim * dim));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            Complex sum = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                sum += std::conj(entries[k * dim + i]) * entries[k * dim + j];
            }
            if (i == j) {
                sum -= 1.0;
            }
            acc += std::norm(sum);
        }
    }
    return std::sqrt(acc);
}

UnitaryOp UnitaryOp::dense(std::size_t dim, std::vector<Complex> entries, const Tolerances& tol)
{
    if (dim < 2 || !std::has_single_bit(dim)) {
        throw ShapeError("dense unitary dimension must be a power of two >= 2");
    }
    if (dim > tol.max_dense_dim) {
        throw SizeError("dense unitary of dimension " + std::to_string(dim) +
                        " exceeds limit; use a diagonal or wire-local form");
    }
    if (unitarity_defect(dim, entries) > tol.unitarity) {
        throw ValidationError("matrix is not unitary");
    }
    return UnitaryOp(Dense{dim, std::move(entries)});
}

UnitaryOp UnitaryOp::diagonal(std::vector<Complex> phases, const Tolerances& tol)
{
    checked_qubits_for_length(phases.size(), tol);
    for (const auto& p : phases) {
        if (std::abs(std::abs(p) - 1.0) > tol.unitarity) {
            throw ValidationError("diagonal entry does not have unit modulus");
        }
    }
    return UnitaryOp(Diagonal{std::move(phases)});
}

UnitaryOp UnitaryOp::single_qubit(std::size_t n_qubits, std::size_t wire, const Gate2x2& gate,
                                  const Tolerances& tol)
{
    check_qubit_count(n_qubits, tol);
    if (wire >= n_qubits) {
        throw ShapeError("wire " + std::to_string(wire) + " outside " + std::to_string(n_qubits) +
                         "-qubit register");
    }
    check_gate(gate, tol);
    return UnitaryOp(WireLocal{n_qubits, wire, gate});
}

std::size_t UnitaryOp::dimension() const noexcept
{
    struct Visitor {
        std::size_t operator()(const Dense& d) const { return d.dim; }
        std::size_t operator()(const Diagonal& d) const { return d.phases.size(); }
        std::size_t operator()(const WireLocal& w) const { return std::size_t{1} << w.n_qubits; }
    };
    return std::visit(Visitor{}, form_);
}

std::vector<Complex> UnitaryOp::to_dense(const Tolerances& tol) const
{
    const std::size_t dim = dimension();
    if (dim > tol.max_dense_dim) {
        throw SizeError("refusing to densify a unitary of dimension " + std::to_string(dim));
    }
    std::vector<Complex> out(dim * dim);
    for (std::size_t col = 0; col < dim; ++col) {
        std::vector<Complex> e(dim);
        e[col] = 1.0;
        const auto image =
            StateAccess::release(apply_unitary(*this, StateAccess::adopt(std::countr_zero(dim), std::move(e))));
        for (std::size_t row = 0; row < dim; ++row) {
            out[row * dim + col] = image[row];
        }
    }
    return out;
}

StateVector uniform_superposition(std::size_t n_qubits, const Tolerances& tol)
{
    check_qubit_count(n_qubits, tol);
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
    return StateAccess::adopt(n_qubits, std::vector<Complex>(dim, Complex{amp, 0.0}));
}

StateVector apply_unitary(const UnitaryOp& u, const StateVector& s)
{
    if (u.dimension() != s.dimension()) {
        throw ShapeError("unitary of dimension " + std::to_string(u.dimension()) +
                         " applied to state of dimension " + std::to_string(s.dimension()));
    }
    const auto in = s.amplitudes();
    std::vector<Complex> out;
    if (const auto* d = std::get_if<UnitaryOp::Dense>(&u.form())) {
        out.assign(d->dim, Complex{});
        for (std::size_t r = 0; r < d->dim; ++r) {
            Complex acc = 0.0;
            const Complex* row = d->entries.data() + r * d->dim;
            for (std::size_t c = 0; c < d->dim; ++c) {
                acc += row[c] * in[c];
            }
            out[r] = acc;
        }
    } else if (const auto* g = std::get_if<UnitaryOp::Diagonal>(&u.form())) {
        out.resize(in.size());
        std::transform(in.begin(), in.end(), g->phases.begin(), out.begin(), std::multiplies<>{});
    } else {
        const auto& w = std::get<UnitaryOp::WireLocal>(u.form());
        out.assign(in.begin(), in.end());
        apply_wire(out, w.wire, w.gate);
    }
    return StateAccess::adopt(s.n_qubits(), std::move(out));
}

StateVector apply_to_all_wires(const Gate2x2& gate, const StateVector& s)
{
    check_gate(gate, kDefaultTolerances);
    std::vector<Complex> amps(s.amplitudes().begin(), s.amplitudes().end());
    for (std::size_t w = 0; w < s.n_qubits(); ++w) {
        apply_wire(amps, w, gate);
    }
    return StateAccess::adopt(s.n_qubits(), std::move(amps));
}

StateVector tensor(const StateVector& a, const StateVector& b, const Tolerances& tol)
{
    const std::size_t n = a.n_qubits() + b.n_qubits();
    if (n > tol.max_qubits) {
        throw SizeError("tensor product of " + std::to_string(n) + " qubits exceeds maximum " +
                        std::to_string(tol.max_qubits));
    }
    const auto lhs = a.amplitudes();
    const auto rhs = b.amplitudes();
    std::vector<Complex> out;
    out.reserve(lhs.size() * rhs.size());
    for (const auto& x : lhs) {
        for (const auto& y : rhs) {
            out.push_back(x * y);
        }
    }
    return StateAccess::adopt(n, std::move(out));
}

std::vector<double> probabilities(const StateVector& s)
{
    std::vector<double> p;
    p.reserve(s.dimension());
    for (const auto& a : s.amplitudes()) {
        p.push_back(std::norm(a));
    }
    return p;
}

std::uint64_t sample_outcome(std::span<const Complex> amplitudes, Rng& rng)
{
    const double u = uniform01(rng) * sum_norm(amplitudes);
    double acc = 0.0;
    std::uint64_t last_nonzero = 0;
    for (std::uint64_t i = 0; i < amplitudes.size(); ++i) {
        const double p = std::norm(amplitudes[i]);
        if (p == 0.0) {
            continue;
        }
        acc += p;
        last_nonzero = i;
        if (u < acc) {
            return i;
        }
    }
    // Rounding can leave u just above the final partial sum.
    return last_nonzero;
}

MeasurementOutcome measure(const StateVector& s, Rng& rng)
{
    const std::uint64_t m = sample_outcome(s.amplitudes(), rng);
    return {m, StateVector::basis(s.n_qubits(), m)};
}

bool is_product_2qubit(const StateVector& s, const Tolerances& tol)
{
    if (s.n_qubits() != 2) {
        throw ShapeError("product-state test needs a 2-qubit register, got " + std::to_string(s.n_qubits()));
    }
    // Amplitude index is 2*q1 + q0; rank-1 iff the 2x2 amplitude matrix is singular.
    const Complex det = s[0] * s[3] - s[1] * s[2];
    return std::abs(det) < tol.product_state;
}

}  // namespace qmud
