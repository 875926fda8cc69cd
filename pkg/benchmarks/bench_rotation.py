"""Time the rotation kernel's compiled backend against the numpy fallback.

Both backends are imported directly, so the comparison runs in a single
process regardless of FCIREDUCE_PURE_PYTHON. Reported times are the best
of ``--repeats`` runs of a full-basis rotation.
"""

import argparse
import time

import numpy as np

from fcireduce import Seed, random_tensor
from fcireduce import _kernels_py
from fcireduce import kernels


def best_time(func, repeats):
    times = []
    for _ in range(repeats):
        begin = time.perf_counter()
        func()
        times.append(time.perf_counter() - begin)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="10:4,12:4,12:5,14:4",
                        help="comma-separated M:N pairs")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if kernels.BACKEND != "compiled":
        parser.error("compiled backend unavailable; build the extension first")

    print(f"{'M':>4} {'N':>3} {'coeffs':>9} {'compiled':>12} "
          f"{'python':>12} {'speedup':>8}")
    for pair in args.sizes.split(","):
        m_orb, n_par = (int(x) for x in pair.split(":"))
        t = random_tensor(m_orb, n_par, Seed(0))
        rng = np.random.default_rng(1)
        q, r = np.linalg.qr(rng.standard_normal((m_orb, m_orb)))
        u = np.ascontiguousarray(q * np.sign(np.diag(r)))

        compiled = best_time(
            lambda: kernels.apply_compound(u, t.coeffs, n_par), args.repeats)
        python = best_time(
            lambda: _kernels_py.apply_compound(u, t.coeffs, n_par, m_orb),
            args.repeats)

        out_a = kernels.apply_compound(u, t.coeffs, n_par)
        out_b = _kernels_py.apply_compound(u, t.coeffs, n_par, m_orb)
        np.testing.assert_allclose(out_a, out_b, atol=1e-12)

        print(f"{m_orb:>4} {n_par:>3} {t.coeffs.size:>9} "
              f"{compiled * 1e3:>10.2f}ms {python * 1e3:>10.2f}ms "
              f"{python / compiled:>7.1f}x")


if __name__ == "__main__":
    main()
