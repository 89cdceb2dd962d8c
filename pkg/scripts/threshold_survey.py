"""Threshold table for named and random graphs.

    python3 scripts/threshold_survey.py --random 10 --max-p 8 --out survey.json
"""
from __future__ import annotations

import argparse
import dataclasses
import time
from dataclasses import dataclass

import numpy as np

from pptsquared import graphs
from pptsquared.classify import thresholds
from pptsquared.cli import dumps, plain


@dataclass
class SurveyConfig:
    random: int = 10
    max_p: int = 8
    seed: int = 0
    restarts: int = 32
    iters: int = 300
    theta_iters: int = 20000
    out: str | None = None


def survey_graphs(cfg: SurveyConfig) -> dict[str, graphs.Graph]:
    out = {
        "K2": graphs.complete_graph(2),
        "K3": graphs.complete_graph(3),
        "P4": graphs.path_graph(4),
        "C5": graphs.cycle_graph(5),
        "K13": graphs.star_graph(3),
        "Petersen": graphs.petersen_graph(),
    }
    rng = np.random.default_rng(cfg.seed)
    for n in range(cfg.random):
        p = int(rng.integers(3, cfg.max_p + 1))
        out[f"G{n}(p={p})"] = graphs.random_graph(p, seed=int(rng.integers(2 ** 31)), min_edges=1)
    return out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in dataclasses.fields(SurveyConfig):
        ap.add_argument("--" + f.name.replace("_", "-"), type=int if f.type == "int" else str, default=f.default)
    cfg = SurveyConfig(**vars(ap.parse_args(argv)))

    rows = {}
    header = f"{'graph':<14}{'p':>3}{'2m':>5}{'t_pos >=':>10}{'t_cp=t_ppt':>12}{'p d':>6}{'theta':>9}{'PPT^2':>7}{'sec':>6}"
    print(header)
    for name, g in survey_graphs(cfg).items():
        start = time.perf_counter()
        rep = thresholds(g.adjacency(), seed=cfg.seed, restarts=cfg.restarts, iters=cfg.iters,
                         theta_iters=cfg.theta_iters)
        sec = time.perf_counter() - start
        rows[name] = rep.to_dict()
        print(f"{name:<14}{g.p:>3}{rep.ordered_edge_count:>5}{rep.t_pos_bracket[0]:>10.4f}"
              f"{rep.t_cp:>12.4f}{rep.t_eb_upper:>6.0f}{rep.theta_bar:>9.4f}"
              f"{str(rep.ppt_squared_ok):>7}{sec:>6.1f}")
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(dumps(plain({"config": dataclasses.asdict(cfg), "graphs": rows})) + "\n")


if __name__ == "__main__":
    main()
