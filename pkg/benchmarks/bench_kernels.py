"""Steps per second of the splitting kernel, compiled vs numpy backend.

    python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""
import argparse
import time

from dirac_tsfp import build_free_modes, kernels
from dirac_tsfp.integrators import SchemeKind, Stepper
from dirac_tsfp.kernels import available_backends
from dirac_tsfp.presets import BUMP


def time_backend(fn, stepper, u, steps, repeat):
    kernels.run_stages = fn
    stepper.advance(u, 10)  # warm-up
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        stepper.advance(u, steps)
        best = min(best, time.perf_counter() - t0)
    return steps / best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 128, 512])
    args = ap.parse_args(argv)

    backends = available_backends()
    original = kernels.run_stages
    print(f"{'scheme':8s} {'M':>5s} " + " ".join(f"{name + ' steps/s':>18s}" for name in backends) + "   speedup")
    try:
        for scheme in (SchemeKind.STRANG, SchemeKind.FOURTH):
            for M in args.sizes:
                g = BUMP.grid(M)
                s = Stepper(scheme, build_free_modes(g), BUMP.potentials(g, 1.0), 0.01)
                u = BUMP.initial(g).values
                rates = {name: time_backend(fn, s, u, args.steps, args.repeat) for name, fn in backends.items()}
                speed = rates.get("cython", float("nan")) / rates["python"]
                cols = " ".join(f"{r:18.0f}" for r in rates.values())
                print(f"{scheme.value:8s} {M:5d} {cols}   {speed:6.1f}x")
    finally:
        kernels.run_stages = original


if __name__ == "__main__":
    main()
