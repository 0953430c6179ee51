"""Compare the compiled statevector kernels against the pure-Python fallback.

Times apply_1q, apply_2q, and pauli_expval on growing state sizes and prints
one table per operation.  Run as:

    python3 benchmarks/bench_kernels.py [--qubits 8 12 16 ...] [--repeats N]
"""

import argparse
import math
import time

import numpy as np

from quantcut import kernels
from quantcut.kernels import _fallback


def _random_state(n_qubits: int, rng) -> np.ndarray:
    amps = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    amps /= np.linalg.norm(amps)
    return np.ascontiguousarray(amps, dtype=np.complex128)


def _u2(rng) -> np.ndarray:
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, _ = np.linalg.qr(m)
    return np.ascontiguousarray(q, dtype=np.complex128)


def _u4(rng) -> np.ndarray:
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    q, _ = np.linalg.qr(m)
    return np.ascontiguousarray(q, dtype=np.complex128)


def _time(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(n_qubits_list, repeats):
    rng = np.random.default_rng(0)
    impls = [("python", _fallback)]
    if kernels.BACKEND == "compiled":
        from quantcut.kernels import _core

        impls.append(("compiled", _core))
    print(f"active backend: {kernels.BACKEND}")
    print(f"best of {repeats} runs, seconds per call\n")

    for op in ("apply_1q", "apply_2q", "pauli_expval"):
        print(op)
        header = "  qubits" + "".join(f"{name:>12}" for name, _ in impls)
        if len(impls) == 2:
            header += f"{'speedup':>10}"
        print(header)
        for n in n_qubits_list:
            base = _random_state(n, rng)
            u2, u4 = _u2(rng), _u4(rng)
            x_mask = int(rng.integers(1, 1 << n))
            z_mask = int(rng.integers(1, 1 << n))
            times = []
            for _, mod in impls:
                work = base.copy()
                if op == "apply_1q":
                    fn = lambda: mod.apply_1q(work, u2, n // 2)
                elif op == "apply_2q":
                    fn = lambda: mod.apply_2q(work, u4, n - 1, 0)
                else:
                    fn = lambda: mod.pauli_expval(work, x_mask, z_mask)
                times.append(_time(fn, repeats))
            row = f"  {n:>6}" + "".join(f"{t:>12.3e}" for t in times)
            if len(times) == 2 and times[1] > 0:
                row += f"{times[0] / times[1]:>9.1f}x"
            print(row)
        print()


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--qubits", type=int, nargs="+", default=[8, 12, 16, 20],
        help="state sizes to benchmark",
    )
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()
    bench(args.qubits, args.repeats)


if __name__ == "__main__":
    main()
