#include "doctest.h"
#include "oracles.hpp"

#include "qmud/errors.hpp"
#include "qmud/qsearch.hpp"

#include <cmath>

using namespace qmud;

namespace {

MarkingOracle single_target(std::size_t n, std::uint64_t target)
{
    return MarkingOracle(n, [target](std::uint64_t i) { return i == target; });
}

}  // namespace

TEST_CASE("oracle compiles the predicate and counts queries")
{
    MarkingOracle o(4, [](std::uint64_t i) { return i % 5 == 0; });
    CHECK(o.dimension() == 16);
    CHECK(o.marked_count() == 4);  // 0, 5, 10, 15
    CHECK(o.query_count() == 0);

    auto s = uniform_superposition(4);
    std::vector<Complex> amps(s.amplitudes().begin(), s.amplitudes().end());
    o.apply_phase_flip(amps);
    CHECK(o.query_count() == 1);
    CHECK(amps[5].real() == doctest::Approx(-0.25));
    CHECK(amps[6].real() == doctest::Approx(0.25));

    CHECK(o.verify(10));
    CHECK_FALSE(o.verify(11));
    CHECK(o.verification_count() == 2);
    CHECK(o.query_count() == 1);

    std::vector<Complex> wrong(8);
    CHECK_THROWS_AS(o.apply_phase_flip(wrong), ShapeError);
}

TEST_CASE("closed-form success probability")
{
    CHECK(grover_success_probability(8, 1, 2) == doctest::Approx(121.0 / 128.0).epsilon(1e-12));
    CHECK(grover_success_probability(4, 1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(grover_success_probability(64, 0, 3) == 0.0);
    CHECK(grover_success_probability(64, 64, 0) == doctest::Approx(1.0));
    for (std::uint64_t k = 0; k < 20; ++k) {
        CHECK(grover_success_probability(1024, 3, k) == doctest::Approx(oracle::grover_probability(1024, 3, k)));
    }
    CHECK_THROWS_AS(grover_success_probability(4, 5, 1), DomainError);
}

TEST_CASE("optimal iteration count")
{
    CHECK(optimal_grover_iterations(4, 1) == 1);
    CHECK(optimal_grover_iterations(8, 1) == 2);
    CHECK(optimal_grover_iterations(64, 1) == 6);
    CHECK(optimal_grover_iterations(1024, 1) == 25);
    CHECK(optimal_grover_iterations(64, 32) == 0);
    CHECK_THROWS_AS(optimal_grover_iterations(64, 0), DomainError);

    // The rounded count is never worse than its neighbours by much.
    for (std::uint64_t n : {16u, 64u, 256u, 4096u}) {
        const auto k = optimal_grover_iterations(n, 1);
        CHECK(grover_success_probability(n, 1, k) > 1.0 - 1.0 / static_cast<double>(n) - 1e-12);
    }
}

TEST_CASE("Grover step matches the explicit operator product")
{
    std::mt19937_64 gen(7);
    for (std::size_t n = 1; n <= 6; ++n) {
        const std::size_t dim = std::size_t{1} << n;
        std::vector<bool> marked(dim);
        for (std::size_t i = 0; i < dim; ++i) marked[i] = (gen() % 4 == 0);
        MarkingOracle o(n, [&](std::uint64_t i) { return marked[i]; });
        const auto g = oracle::grover_matrix(n, marked);

        auto psi = oracle::random_state(dim, gen);
        auto s = StateVector::from_amplitudes(psi);
        for (int step = 0; step < 4; ++step) {
            s = grover_iterate(o, s);
            psi = oracle::matvec(g, psi);
            std::vector<Complex> got(s.amplitudes().begin(), s.amplitudes().end());
            CHECK(oracle::max_abs_diff(got, psi) < 1e-12);
            CHECK(std::abs(s.norm_squared() - 1.0) < 1e-9);
        }
        CHECK(o.query_count() == 4);
    }
}

TEST_CASE("diffusion built from library gates agrees with the kernel")
{
    // H^n (2|0><0| - I) H^n assembled from qcore operators, applied after the oracle.
    const std::size_t n = 5;
    const std::size_t dim = 32;
    MarkingOracle o = single_target(n, 19);
    std::vector<Complex> reflect(dim, Complex{-1.0});
    reflect[0] = 1.0;
    const auto r0 = UnitaryOp::diagonal(reflect);

    auto kernel = uniform_superposition(n);
    auto composed = uniform_superposition(n);
    for (int step = 0; step < 4; ++step) {
        kernel = grover_iterate(o, kernel);
        composed = apply_unitary(o.as_unitary(), composed);
        composed = apply_to_all_wires(gates::hadamard(), composed);
        composed = apply_unitary(r0, composed);
        composed = apply_to_all_wires(gates::hadamard(), composed);
    }
    std::vector<Complex> a(kernel.amplitudes().begin(), kernel.amplitudes().end());
    std::vector<Complex> b(composed.amplitudes().begin(), composed.amplitudes().end());
    CHECK(oracle::max_abs_diff(a, b) < 1e-12);
    CHECK(std::norm(kernel[19]) == doctest::Approx(oracle::grover_probability(32, 1, 4)));
}

TEST_CASE("marked-state amplitude follows sin((2k+1) theta)")
{
    for (std::uint64_t marked : {1u, 3u, 10u}) {
        MarkingOracle o(8, [marked](std::uint64_t i) { return i < marked; });
        auto s = uniform_superposition(8);
        for (std::uint64_t k = 1; k <= 12; ++k) {
            s = grover_iterate(o, s);
            double p = 0.0;
            for (std::uint64_t i = 0; i < marked; ++i) p += std::norm(s[i]);
            CHECK(p == doctest::Approx(oracle::grover_probability(256, double(marked), double(k))).epsilon(1e-9));
        }
    }
}

TEST_CASE("grover_run measures, verifies and counts")
{
    Rng rng = make_rng(1);
    auto o = single_target(2, 3);
    const auto r = grover_run(o, 1, rng);
    CHECK(r.succeeded);
    CHECK(r.found == 3u);
    CHECK(r.grover_queries == 1);
    CHECK(r.verification_queries == 1);
    CHECK(r.total_queries() == 2);

    auto o8 = single_target(3, 6);
    int hits = 0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) hits += grover_search(o8, 1, rng).succeeded;
    const double p = 121.0 / 128.0;
    CHECK(std::abs(hits / double(trials) - p) < 4.0 * oracle::binomial_sigma(p, trials));
}

TEST_CASE("BBHT finds a solution with an unknown count")
{
    Rng rng = make_rng(2);
    const int trials = 2000;
    double mean_grover = 0.0;
    for (int t = 0; t < trials; ++t) {
        MarkingOracle o(4, [](std::uint64_t i) { return i % 4 == 1; });
        const auto r = bbht_search(o, rng);
        CHECK(r.succeeded);
        CHECK(o.is_marked(*r.found));
        mean_grover += static_cast<double>(r.grover_queries) / trials;
    }
    CHECK(mean_grover <= 9.0);
}

TEST_CASE("BBHT respects its budget when nothing is marked")
{
    Rng rng = make_rng(3);
    MarkingOracle none(6, [](std::uint64_t) { return false; });
    BbhtOptions opts;
    opts.max_total_queries = 40;
    const auto r = bbht_search(none, rng, opts);
    CHECK_FALSE(r.succeeded);
    CHECK_FALSE(r.found.has_value());
    CHECK(r.total_queries() <= 40);

    BbhtOptions bad;
    bad.growth = 1.0;
    CHECK_THROWS_AS(bbht_search(none, rng, bad), DomainError);
}

TEST_CASE("existence test")
{
    Rng rng = make_rng(4);
    int detected = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
        auto o = single_target(6, uniform_index(rng, 64));
        detected += existence_test(o, rng, 3);
    }
    CHECK(detected / double(trials) >= 0.99);

    MarkingOracle none(6, [](std::uint64_t) { return false; });
    for (int t = 0; t < 200; ++t) CHECK_FALSE(existence_test(none, rng, 3));
    CHECK_THROWS_AS(existence_test(none, rng, 0), DomainError);
}

TEST_CASE("maximum search returns the argmax")
{
    Rng rng = make_rng(5);
    std::mt19937_64 gen(5);
    std::normal_distribution<double> g;
    int agree = 0;
    const int trials = 300;
    double mean_total = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> scores(256);
        for (auto& s : scores) s = g(gen);
        const auto truth = oracle::unique_argmax(256, [&](std::uint64_t i) { return scores[i]; });
        const auto r = maximum_search(scores, rng);
        CHECK(r.succeeded);
        CHECK(r.found.has_value());
        CHECK(r.threshold_rounds >= 3);
        agree += (static_cast<std::int64_t>(*r.found) == truth);
        mean_total += static_cast<double>(r.total_queries()) / trials;
    }
    CHECK(agree >= trials - 3);
    CHECK(mean_total < 256.0);

    const auto via_fn = maximum_search([](std::uint64_t i) { return -std::abs(double(i) - 37.0); }, 6, rng);
    CHECK(via_fn.found == 37u);

    std::vector<double> odd(6);
    CHECK_THROWS_AS(maximum_search(odd, rng), ShapeError);
}
