"""Pseudo-Helmholtz descent of the normalizer driven by the adder trajectory."""

import argparse
from dataclasses import dataclass

import numpy as np

from crncompose import TrajectoryInput, load_builtin, lyapunov_descent_probe, reduce_mscrc


@dataclass
class ProbeConfig:
    x0: tuple = (0.2, 0.3, 0.6, 0.1)
    z0: tuple = (0.5, 0.5)
    eta: float = 1e-6


def run(cfg: ProbeConfig):
    adder = load_builtin("adder")
    reduced = reduce_mscrc(load_builtin("normalizer"))
    driven = reduced.bind(TrajectoryInput(adder.crn, (*cfg.x0, 0.0, 0.0)))
    y1, y2 = cfg.x0[0] + cfg.x0[1], cfg.x0[2] + cfg.x0[3]
    total = sum(cfg.z0)
    s_bar = (total * y2 / (y1 + y2), total * y1 / (y1 + y2))
    return lyapunov_descent_probe(driven, s_bar, cfg.z0, eta=cfg.eta), s_bar


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--z1", type=float, default=0.5)
    args = p.parse_args()
    probe, s_bar = run(ProbeConfig(z0=(args.z1, 1.0 - args.z1)))
    print(f"target {s_bar[0]:.6f}, {s_bar[1]:.6f}")
    for key, value in probe.to_dict().items():
        print(f"{key:22s} {value}")
    v = probe.values
    print(f"V(0)={v[0]:.3e}  V(end)={v[-1]:.3e}  max rise={np.nanmax(np.diff(v)):.1e}")


if __name__ == "__main__":
    main()
