"""Benchmark the compiled Numerov kernel against the pure-Python fallback.

Usage::

    python benchmarks/bench_numerov.py [--repeat 5]

Times the inward Numerov sweep on the grid of a few Rydberg levels, both for
the bare kernel and end-to-end (``radial_wavefunction`` with its cache
cleared), and checks that both paths give identical wavefunctions.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from rydvdw import radial
from rydvdw._accel import NUMBA_ENABLED
from rydvdw.species import StateLabel, get_species

STATES = [StateLabel("Rb", 40, 0, 1), StateLabel("Rb", 70, 2, 5), StateLabel("Cs", 100, 1, 3)]


def kernel_inputs(state: StateLabel, step: float = radial.DEFAULT_STEP) -> tuple:
    """Argument tuple of the Numerov kernels for ``state``."""
    sp = get_species(state.species)
    n_star = sp.n_star(state.n, state.l, state.tj)
    return radial.numerov_inputs(state.n, state.l, n_star, sp.inner_cutoff_radius, step)[1]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not NUMBA_ENABLED:
        print("numba unavailable or disabled; both columns time the fallback")
    print(f"{'state':>10} {'points':>8} {'numba ms':>10} {'python ms':>10} {'speed-up':>9} {'e2e speed-up':>13}")
    for st in STATES:
        inputs = kernel_inputs(st)
        radial.numerov_inward(*inputs)  # compile outside the timing
        fast = min(timeit.repeat(lambda: radial.numerov_inward(*inputs), number=3, repeat=args.repeat)) / 3
        slow = min(timeit.repeat(lambda: radial.numerov_inward_py(*inputs), number=1, repeat=args.repeat))
        y_fast, _ = radial.numerov_inward(*inputs)
        y_slow, _ = radial.numerov_inward_py(*inputs)
        assert np.array_equal(y_fast, y_slow), "kernels disagree"

        def e2e(acc: bool) -> float:
            def run():
                radial._wavefunction.cache_clear()
                radial.radial_wavefunction(st, accelerated=acc)
            return min(timeit.repeat(run, number=1, repeat=args.repeat))

        e_fast, e_slow = e2e(True), e2e(False)
        print(f"{st.label:>10} {len(inputs[0]):>8d} {fast * 1e3:>10.3f} {slow * 1e3:>10.2f} "
              f"{slow / fast:>8.0f}x {e_slow / e_fast:>12.1f}x")


if __name__ == "__main__":
    main()
