"""Grid sweeps over sample size, iterations, mode, hypothesis coarseness,
and reward heterogeneity, with per-cell seed aggregation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .decomposition import DecompositionReport, decompose
from .fqi import HypothesisSpace, fqi_run
from .mdp import FiniteMDPSpec, value_iteration_oracle


def sweep(
    spec_family,
    grid: dict,
    seeds: list[int] | int = 8,
) -> list[dict]:
    """One aggregated row (mean and sd per report field) per grid point.

    ``spec_family`` maps a diversity-knob value to a FiniteMDPSpec;
    ``grid`` holds lists under the keys N, T, mode, aggregation, diversity
    (missing keys get a one-point default).
    """
    if isinstance(seeds, int):
        seeds = list(range(seeds))
    ns = list(grid.get("N", [1000]))
    ts = list(grid.get("T", [20]))
    modes = list(grid.get("mode", ["separate"]))
    aggs = list(grid.get("aggregation", [None]))
    knobs = list(grid.get("diversity", [0.0]))

    oracle_cache: dict = {}
    rows: list[dict] = []
    for knob, mode, agg, N, T in itertools.product(knobs, modes, aggs, ns, ts):
        spec = spec_family(knob)
        key = id(spec) if knob not in oracle_cache else knob
        if knob not in oracle_cache:
            oracle_cache[knob] = (spec, value_iteration_oracle(spec))
        spec, oracle = oracle_cache[knob]
        n_obs = spec.agents[0].n_obs
        hyp = (
            HypothesisSpace()
            if agg is None
            else HypothesisSpace.aggregated_uniform(n_obs, int(agg))
        )
        reports: list[DecompositionReport] = []
        for seed in seeds:
            iterates = fqi_run(spec, hyp, mode, N=int(N), T=int(T), seed=seed)
            rep = decompose(
                spec, iterates[-1], N=int(N), T=int(T), mode=mode,
                hypothesis=hyp, oracle=oracle,
            )
            reports.append(rep)
        row: dict = {
            "diversity": knob,
            "mode": mode,
            "aggregation": "" if agg is None else int(agg),
            "N": int(N),
            "T": int(T),
            "seeds": len(seeds),
        }
        for f in DecompositionReport.FIELDS:
            vals = np.array([getattr(r, f) for r in reports], dtype=float)
            row[f"{f}_mean"] = float(np.mean(vals))
            row[f"{f}_sd"] = float(np.std(vals))
        rows.append(row)
    return rows
