"""Python bindings for the qmud simulator."""

from ._core import (
    ber_sweep,
    binary_entropy,
    bsc_capacity,
    bsc_demo,
    grover_amplitudes,
    grover_success_probability,
    hypothesis_from_index,
    index_from_bits,
    maximum_search,
    optimal_grover_iterations,
    run_cli,
)

__all__ = [
    "ber_sweep",
    "binary_entropy",
    "bsc_capacity",
    "bsc_demo",
    "grover_amplitudes",
    "grover_success_probability",
    "hypothesis_from_index",
    "index_from_bits",
    "maximum_search",
    "optimal_grover_iterations",
    "run_cli",
]
