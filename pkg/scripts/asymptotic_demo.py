"""Distances from the iterates of (1/t) gamma_{t,A} to their idempotent limit.

    python3 scripts/asymptotic_demo.py --graph petersen --t 20 --steps 25
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from pptsquared import graphs
from pptsquared.channel import make_gamma
from pptsquared.classify import t_ppt_value
from pptsquared.dynamics import convergence_report, normalize_channel

GRAPHS = {
    "k2": lambda: graphs.complete_graph(2),
    "c5": lambda: graphs.cycle_graph(5),
    "star": lambda: graphs.star_graph(3),
    "petersen": graphs.petersen_graph,
}


@dataclass
class DemoConfig:
    graph: str = "petersen"
    t: float | None = None
    steps: int = 25


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graph", choices=sorted(GRAPHS), default=DemoConfig.graph)
    ap.add_argument("--t", type=float, default=None, help="defaults to t_ppt")
    ap.add_argument("--steps", type=int, default=DemoConfig.steps)
    cfg = DemoConfig(**vars(ap.parse_args(argv)))

    g = GRAPHS[cfg.graph]()
    a = g.adjacency()
    t = t_ppt_value(a) if cfg.t is None else cfg.t
    tr = convergence_report(normalize_channel(make_gamma(t, a)), cfg.steps)
    norm_a = float(np.linalg.norm(a))
    print(f"graph={cfg.graph} p={g.p} t={t:.6g} hypothesis={tr.hypothesis} psi_is_ppt={tr.psi_is_ppt}")
    print(f"{'k':>3}{'distance':>14}{'t^-k |A|':>14}{'rel err':>11}")
    for k, dist in zip(tr.k_values, tr.distances):
        ref = t ** (-k) * norm_a
        print(f"{k:>3}{dist:>14.4e}{ref:>14.4e}{abs(dist - ref) / ref:>11.1e}")
    print(f"fitted rate {tr.fitted_rate:.6f}  subdominant radius {tr.subdominant_radius:.6f}  1/t {1 / t:.6f}")


if __name__ == "__main__":
    main()
