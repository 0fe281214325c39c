"""Compare the compiled and pure-Python sector assembly kernels.

    python3 benchmarks/bench_kernels.py --sites 24 --particles 3 --repeat 3

Both kernels receive the same hopping-plus-pair terms on a chain; the script
checks that they return identical triplets and prints the timings.
"""

import argparse
import time

import numpy as np

from fermigroupoid._native import _fallback
from fermigroupoid.fock import _terms_to_masks
from fermigroupoid.hamiltonian import LatticeHamiltonian, hopping, pair_diagonal
from fermigroupoid.pattern import generate

try:
    from fermigroupoid._native import _core
except ImportError:
    _core = None


def chain_terms(sites: int):
    pattern = generate("periodic", {"d": 1}, window=(sites - 1) / 2, center=[(sites - 1) / 2])
    ham = LatticeHamiltonian(pattern, [hopping(1.0), pair_diagonal(-2.0)])
    return _terms_to_masks(ham.car_element().terms, len(pattern)), len(pattern)


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sites", type=int, default=24)
    ap.add_argument("--particles", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    (cm, am, vals), n = chain_terms(args.sites)
    run_py = lambda: _fallback.dress_terms(cm, am, vals, n, args.particles)  # noqa: E731
    ref = run_py()
    t_py = best_of(run_py, args.repeat)
    print(f"sites={n} N={args.particles} terms={len(vals)} nnz={len(ref[2])}")
    print(f"python    {t_py * 1e3:10.2f} ms")
    if _core is None:
        print("compiled  (extension not built)")
        return
    run_c = lambda: _core.dress_terms(cm, am, vals, n, args.particles)  # noqa: E731
    out = run_c()
    same = all(np.array_equal(a, b) for a, b in zip(ref, out))
    t_c = best_of(run_c, args.repeat)
    print(f"compiled  {t_c * 1e3:10.2f} ms   speedup {t_py / t_c:6.1f}x   identical={same}")


if __name__ == "__main__":
    main()
