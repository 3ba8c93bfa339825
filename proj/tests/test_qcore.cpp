#include "doctest.h"
#include "oracles.hpp"

#include "qmud/errors.hpp"
#include "qmud/qcore.hpp"

#include <cmath>
#include <numbers>

using namespace qmud;

namespace {

std::vector<Complex> amps(const StateVector& s)
{
    return {s.amplitudes().begin(), s.amplitudes().end()};
}

}  // namespace

TEST_CASE("state vector validation")
{
    CHECK_THROWS_AS(StateVector::from_amplitudes({1.0, 0.0, 0.0}), ShapeError);
    CHECK_THROWS_AS(StateVector::from_amplitudes({}), ShapeError);
    CHECK_THROWS_AS(StateVector::from_amplitudes({1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(StateVector::basis(2, 4), DomainError);
    CHECK_THROWS_AS(StateVector::basis(kDefaultTolerances.max_qubits + 1, 0), SizeError);

    const auto s = StateVector::basis(3, 5);
    CHECK(s.n_qubits() == 3);
    CHECK(s.dimension() == 8);
    CHECK(s[5] == Complex{1.0, 0.0});
    CHECK(s.norm_squared() == doctest::Approx(1.0));
}

TEST_CASE("uniform superposition equals H on every wire of |0>")
{
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto u = uniform_superposition(n);
        const auto h = apply_to_all_wires(gates::hadamard(), StateVector::basis(n, 0));
        CHECK(oracle::max_abs_diff(amps(u), amps(h)) < 1e-12);
        CHECK(u[0].real() == doctest::Approx(1.0 / std::sqrt(double(1u << n))));
    }
}

TEST_CASE("wire-local gates match explicit Kronecker products")
{
    // Oracle: I (x) ... (x) G (x) ... (x) I with qubit k at bit k, i.e. the
    // leftmost Kronecker factor is the highest wire.
    std::mt19937_64 rng(11);
    const std::size_t n = 4;
    const std::size_t dim = 16;
    for (std::size_t wire = 0; wire < n; ++wire) {
        const auto g1 = oracle::random_unitary(2, rng);
        Gate2x2 g{g1[0], g1[1], g1[2], g1[3]};
        oracle::Matrix full{1.0};
        std::size_t d = 1;
        for (std::size_t q = n; q-- > 0;) {
            full = oracle::kron(full, d, q == wire ? g1 : oracle::identity(2), 2);
            d *= 2;
        }
        const auto psi = oracle::random_state(dim, rng);
        const auto out = apply_unitary(UnitaryOp::single_qubit(n, wire, g), StateVector::from_amplitudes(psi));
        CHECK(oracle::max_abs_diff(amps(out), oracle::matvec(full, psi)) < 1e-12);
        CHECK(oracle::max_abs_diff(UnitaryOp::single_qubit(n, wire, g).to_dense(), full) < 1e-12);
    }
}

TEST_CASE("little-endian tensor convention")
{
    // |1> on a one-qubit register tensored with |0> puts weight at index 1 * 2 + 0.
    const auto t = tensor(StateVector::basis(1, 1), StateVector::basis(1, 0));
    CHECK(std::abs(t[2] - Complex{1.0, 0.0}) < 1e-15);

    // X on wire 0 of |00> gives index 1, on wire 1 gives index 2.
    const auto x0 = apply_unitary(UnitaryOp::single_qubit(2, 0, gates::pauli_x()), StateVector::basis(2, 0));
    const auto x1 = apply_unitary(UnitaryOp::single_qubit(2, 1, gates::pauli_x()), StateVector::basis(2, 0));
    CHECK(std::abs(x0[1]) == doctest::Approx(1.0));
    CHECK(std::abs(x1[2]) == doctest::Approx(1.0));

    std::mt19937_64 rng(3);
    const auto a = oracle::random_state(4, rng);
    const auto b = oracle::random_state(8, rng);
    const auto ab = tensor(StateVector::from_amplitudes(a), StateVector::from_amplitudes(b));
    CHECK(ab.n_qubits() == 5);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 8; ++j) CHECK(std::abs(ab[i * 8 + j] - a[i] * b[j]) < 1e-15);
}

TEST_CASE("dense and diagonal operators")
{
    std::mt19937_64 rng(5);
    for (std::size_t dim : {2u, 4u, 8u, 32u}) {
        const auto u = oracle::random_unitary(dim, rng);
        CHECK(unitarity_defect(dim, u) < 1e-9);
        const auto op = UnitaryOp::dense(dim, u);
        const auto psi = oracle::random_state(dim, rng);
        const auto out = apply_unitary(op, StateVector::from_amplitudes(psi));
        CHECK(oracle::max_abs_diff(amps(out), oracle::matvec(u, psi)) < 1e-12);
        CHECK(out.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    }

    std::vector<Complex> bad = oracle::identity(4);
    bad[5] = 2.0;
    CHECK_THROWS_AS(UnitaryOp::dense(4, bad), ValidationError);
    CHECK_THROWS_AS(UnitaryOp::dense(4, std::vector<Complex>(15)), ShapeError);
    CHECK_THROWS_AS(UnitaryOp::dense(2048, oracle::identity(2048)), SizeError);
    CHECK_THROWS_AS(UnitaryOp::diagonal({1.0, 0.5}), ValidationError);
    CHECK_THROWS_AS(UnitaryOp::single_qubit(2, 2, gates::hadamard()), ShapeError);

    const auto diag = UnitaryOp::diagonal({1.0, -1.0, std::polar(1.0, 0.3), Complex{0.0, 1.0}});
    const auto out = apply_unitary(diag, uniform_superposition(2));
    CHECK(std::abs(out[1] + 0.5) < 1e-15);
    CHECK(std::abs(out[3] - Complex{0.0, 0.5}) < 1e-15);
    CHECK_THROWS_AS(apply_unitary(diag, uniform_superposition(3)), ShapeError);
}

TEST_CASE("unitary evolution preserves the norm")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 6;
        const std::size_t dim = std::size_t{1} << n;
        auto s = StateVector::from_amplitudes(oracle::random_state(dim, rng));
        s = apply_unitary(UnitaryOp::dense(dim, oracle::random_unitary(dim, rng)), s);
        s = apply_to_all_wires(gates::hadamard(), s);
        s = apply_unitary(UnitaryOp::single_qubit(n, trial % n, gates::phase(0.1 * trial)), s);
        CHECK(std::abs(s.norm_squared() - 1.0) < 1e-9);
    }
}

TEST_CASE("gates are unitary with the textbook entries")
{
    const double r = 1.0 / std::numbers::sqrt2;
    const auto h = gates::hadamard();
    CHECK(h[0].real() == doctest::Approx(r));
    CHECK(h[3].real() == doctest::Approx(-r));
    for (const auto& g : {gates::identity(), gates::hadamard(), gates::pauli_x(), gates::pauli_z(), gates::phase(1.3)}) {
        CHECK(unitarity_defect(2, g) < 1e-12);
    }
}

TEST_CASE("measurement statistics follow the Born rule")
{
    std::mt19937_64 gen(29);
    Rng rng = make_rng(29);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t dim = 16;
        const auto psi = oracle::random_state(dim, gen);
        const auto s = StateVector::from_amplitudes(psi);
        std::vector<double> probs(dim);
        for (std::size_t i = 0; i < dim; ++i) probs[i] = std::norm(psi[i]);
        std::vector<std::uint64_t> counts(dim);
        for (int shot = 0; shot < 100000; ++shot) ++counts[sample_outcome(s.amplitudes(), rng)];
        const auto chi = oracle::chi_square(probs, counts);
        CHECK(chi.statistic < oracle::chi_square_critical(chi.dof, 1e-3));
    }
}

TEST_CASE("measurement collapses to the observed basis state")
{
    Rng rng = make_rng(31);
    const std::vector<Complex> psi{0.0, std::sqrt(0.25), 0.0, std::sqrt(0.75)};
    for (int i = 0; i < 200; ++i) {
        const auto m = measure(StateVector::from_amplitudes(psi), rng);
        CHECK((m.outcome == 1 || m.outcome == 3));
        CHECK(std::abs(m.post_state[m.outcome]) == doctest::Approx(1.0));
    }
}

TEST_CASE("two-qubit product-state test")
{
    const double r = 1.0 / std::numbers::sqrt2;
    CHECK_FALSE(is_product_2qubit(StateVector::from_amplitudes({r, 0.0, 0.0, r})));
    CHECK_FALSE(is_product_2qubit(StateVector::from_amplitudes({0.0, r, -r, 0.0})));
    CHECK(is_product_2qubit(StateVector::basis(2, 3)));
    CHECK(is_product_2qubit(uniform_superposition(2)));

    std::mt19937_64 rng(41);
    for (int i = 0; i < 100; ++i) {
        const auto a = StateVector::from_amplitudes(oracle::random_state(2, rng));
        const auto b = StateVector::from_amplitudes(oracle::random_state(2, rng));
        CHECK(is_product_2qubit(tensor(a, b)));
        CHECK_FALSE(is_product_2qubit(StateVector::from_amplitudes(oracle::random_state(4, rng))));
    }
    CHECK_THROWS_AS(is_product_2qubit(StateVector::basis(3, 0)), ShapeError);
}
