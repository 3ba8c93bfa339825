#include "cli.hpp"
#include "qmud/cdma.hpp"
#include "qmud/errors.hpp"
#include "qmud/mud.hpp"
#include "qmud/qchannel.hpp"
#include "qmud/qsearch.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <set>
#include <sstream>

namespace py = pybind11;
using namespace qmud;

namespace {

std::vector<Complex> grover_amplitudes(std::size_t n_qubits, const std::vector<std::uint64_t>& marked,
                                       std::uint64_t iterations)
{
    const std::set<std::uint64_t> targets(marked.begin(), marked.end());
    MarkingOracle oracle(n_qubits, [&](std::uint64_t i) { return targets.count(i) != 0; });
    auto s = uniform_superposition(n_qubits);
    for (std::uint64_t k = 0; k < iterations; ++k) {
        s = grover_iterate(oracle, s);
    }
    return {s.amplitudes().begin(), s.amplitudes().end()};
}

py::dict maximum_search_py(const std::vector<double>& scores, std::uint64_t seed)
{
    Rng rng = make_rng(seed);
    const auto r = maximum_search(scores, rng);
    py::dict d;
    d["index"] = *r.found;
    d["grover_queries"] = r.grover_queries;
    d["verification_queries"] = r.verification_queries;
    d["threshold_rounds"] = r.threshold_rounds;
    return d;
}

py::dict bsc_demo(std::uint64_t bits, double p, std::uint64_t seed)
{
    Rng rng = make_rng(seed);
    const auto r = run_demo(bits, p, rng);
    py::dict d;
    d["n_bits"] = r.n_bits;
    d["p"] = r.p;
    d["classical_errors"] = r.classical_errors;
    d["quantum_errors"] = r.quantum_errors;
    d["classical_error_rate"] = r.classical_error_rate;
    d["quantum_error_rate"] = r.quantum_error_rate;
    d["classical_capacity"] = r.classical_capacity;
    return d;
}

py::list ber_sweep_py(std::size_t users, std::size_t chips, const std::string& signature, const std::string& sync,
                      const std::string& gain, const std::string& detector, const std::string& cost,
                      const std::vector<double>& ebn0_db, std::uint64_t trials, std::uint64_t seed,
                      std::size_t threads)
{
    ScenarioParams p;
    p.users = users;
    p.chips = chips;
    p.signature = parse_signature_kind(signature);
    p.sync = parse_sync_mode(sync);
    p.gain = parse_gain_model(gain);
    p.seed = seed;
    BerSweepOptions opts;
    opts.detector = parse_detector_kind(detector);
    opts.cost = parse_cost_kind(cost);
    opts.ebn0_db = ebn0_db;
    opts.trials = trials;
    opts.seed = seed;
    opts.threads = threads;
    BerCurve curve;
    {
        py::gil_scoped_release release;
        curve = ber_sweep(CdmaScenario(p), opts);
    }
    py::list out;
    for (const auto& pt : curve.points) {
        py::dict d;
        d["ebn0_db"] = pt.ebn0_db;
        d["ber"] = pt.ber;
        d["trials"] = pt.trials;
        d["bit_errors"] = pt.bit_errors;
        d["mean_cf_evaluations"] = pt.mean_cf_evaluations;
        d["mean_grover_queries"] = pt.mean_grover_queries;
        out.append(d);
    }
    return out;
}

py::tuple run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "qmud");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Grover search, DS-CDMA multi-user detection and the bit-flip channel demo";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<SizeError>(m, "SizeError", base.ptr());
    py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    m.def("grover_success_probability", &grover_success_probability, py::arg("n_items"), py::arg("n_marked"),
          py::arg("iterations"));
    m.def("optimal_grover_iterations", &optimal_grover_iterations, py::arg("n_items"), py::arg("n_marked"));
    m.def("grover_amplitudes", &grover_amplitudes, py::arg("n_qubits"), py::arg("marked"), py::arg("iterations"),
          "Register amplitudes after the given number of Grover steps from the uniform state.");
    m.def("maximum_search", &maximum_search_py, py::arg("scores"), py::arg("seed") = kDefaultSeed);

    m.def("hypothesis_from_index", [](std::uint64_t index, std::size_t users) {
        return hypothesis_from_index(index, users).bits;
    }, py::arg("index"), py::arg("users"));
    m.def("index_from_bits", [](const std::vector<int>& bits) { return index_from_bits(bits); }, py::arg("bits"));
    m.def("ber_sweep", &ber_sweep_py, py::arg("users"), py::arg("chips"), py::arg("signature") = "walsh",
          py::arg("sync") = "synchronous", py::arg("gain") = "fixed", py::arg("detector") = "ml_exhaustive",
          py::arg("cost") = "mls_chip", py::arg("ebn0_db") = std::vector<double>{0.0}, py::arg("trials") = 1000,
          py::arg("seed") = kDefaultSeed, py::arg("threads") = 1);

    m.def("binary_entropy", &binary_entropy, py::arg("p"));
    m.def("bsc_capacity", &bsc_capacity, py::arg("p"));
    m.def("bsc_demo", &bsc_demo, py::arg("bits"), py::arg("p"), py::arg("seed") = kDefaultSeed);

    m.def("run_cli", &run_cli, py::arg("args"), "Run the qmud command line; returns (exit_code, stdout, stderr).");
}
