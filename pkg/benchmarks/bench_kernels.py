"""Time the ladder trans-impedance kernel with both backends.

    python3 benchmarks/bench_kernels.py [--points 20000] [--nodes 100] [--repeat 5]
"""

import argparse
import sys
import time

import numpy as np

from cavityheat import _kernels
from cavityheat.circuit import build_network
from cavityheat.config import load_config


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--nodes", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--config", default="configs/fig3.cfg")
    args = ap.parse_args(argv)

    net = build_network(load_config(args.config).system, args.nodes)
    omega = np.geomspace(1e-4, 30, args.points) * net.omega_1
    i, j = net.rows
    call = (omega, net.series_resistance, net.series_inductance, net.node_capacitance, j, i)

    t_np, ref = best_of(lambda: _kernels._ladder_element_numpy(*call), args.repeat)
    print(f"numpy  : {t_np * 1e3:9.2f} ms  ({args.points} frequencies, {args.nodes} nodes)")
    if not _kernels.HAVE_NUMBA:
        print("numba  : not installed")
        return 0
    _kernels._ladder_element_numba(*call)  # compile
    t_nb, out = best_of(lambda: _kernels._ladder_element_numba(*call), args.repeat)
    err = float(np.max(np.abs(out - ref) / np.abs(ref)))
    print(f"numba  : {t_nb * 1e3:9.2f} ms  speedup {t_np / t_nb:5.1f}x  max rel diff {err:.1e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
