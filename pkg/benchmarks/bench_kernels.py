"""Compare the compiled and numpy kernels on the two hot loops.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from xfmrlife import kernels
from xfmrlife.bess import BessParams, GAConfig, _draw_ga


def thermal_case():
    r = np.random.default_rng(0)
    amb, k = r.uniform(0, 40, 8760), r.uniform(0, 1.4, 8760)
    args = (amb, k, 20.0, 10.0, 55.0, 25.0, 5.0, 0.8, 0.8, 3.5, 5 / 60, 1.0)
    return "thermal_path (one year)", lambda mod: mod.thermal_path(*args)


def ga_case():
    h = np.arange(24)
    net = 20 + 8 * np.exp(-0.5 * ((h - 19) / 2.5) ** 2) + 5 * np.exp(-0.5 * ((h - 7) / 2) ** 2)
    p = BessParams(40.0)
    d = _draw_ga(np.random.default_rng(1), GAConfig(), p.rated_kw)
    args = (net, float(net.mean()), p.soc_initial, p.capacity_kwh, p.rated_kw, p.efficiency,
            p.sqrt_eta, p.soc_min, d.pop0, d.tour, d.cx_gate, d.mut_gate, d.mut_noise,
            d.reset_gate, d.reset_value, 2)
    return "run_ga (one day, default budget)", lambda mod: mod.run_ga(*args)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    mods = kernels.backends()
    if "cython" not in mods:
        print("compiled kernels unavailable; only the numpy backend is timed")
    print(f"{'case':36s}" + "".join(f"{name:>14s}" for name in mods) + "   speedup")
    for label, fn in (thermal_case(), ga_case()):
        times = {}
        for name, mod in mods.items():
            fn(mod)  # warm up
            times[name] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        row = f"{label:36s}" + "".join(f"{times[n] * 1e3:12.2f}ms" for n in mods)
        if len(times) == 2:
            row += f"   {times['python'] / times['cython']:6.1f}x"
        print(row)


if __name__ == "__main__":
    main()
