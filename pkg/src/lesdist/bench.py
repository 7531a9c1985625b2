"""Tori benchmark: distances between 2-D/3-D tori as the minor radius shrinks.

For each scale ``c`` and trial, four clouds are sampled independently
(no pointwise correspondence): ``T2``, ``T2Sc`` (minor radius ``c * R2``),
``T3`` and ``T3Sc`` (innermost radius ``c * R3``).  The six pairwise LES
and heat-trace distances are averaged over trials.  An optional sweep over
``N`` records ``d(T2, T3)`` normalised by its value at the largest ``N``
together with wall-clock times.
"""
from __future__ import annotations

import itertools
import time
from typing import Sequence

import numpy as np

from .data import ToriConfig, generate_torus2, generate_torus3
from .distances import imd_approx, les_descriptor, les_distance
from .errors import ConfigurationError
from .pipeline import RunConfig, compute_spectrum

REPORT_SCHEMA_ID = "les-bench-tori-v1"
SHAPES = ("T2", "T2Sc", "T3", "T3Sc")
PAIRS = tuple(f"{a}|{b}" for a, b in itertools.combinations(SHAPES, 2))
METHODS = ("les", "imd_approx")

_STATS = {
    "type": "object",
    "required": ["mean", "std"],
    "properties": {
        "mean": {"type": "array", "items": {"type": "number"}},
        "std": {"type": "array", "items": {"type": "number"}},
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "config", "c_grid", "n_points", "trials", "pairs", "results", "timings", "stability"],
    "properties": {
        "schema": {"const": REPORT_SCHEMA_ID},
        "config": {
            "type": "object",
            "required": ["k", "m", "gamma", "sigma_multiplier", "seed", "mode", "exact_threshold"],
        },
        "c_grid": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "maximum": 1}},
        "n_points": {"type": "integer", "minimum": 2},
        "trials": {"type": "integer", "minimum": 1},
        "pairs": {"type": "array", "items": {"type": "string"}},
        "results": {
            "type": "object",
            "required": list(METHODS),
            "additionalProperties": {"type": "object", "additionalProperties": _STATS},
        },
        "timings": {
            "type": "object",
            "required": ["descriptor_seconds_mean", "total_seconds"],
            "properties": {
                "descriptor_seconds_mean": {"type": "number", "minimum": 0},
                "total_seconds": {"type": "number", "minimum": 0},
            },
        },
        "stability": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["n", "d_T2_T3", "ratio", "seconds"],
                "properties": {
                    "n": {"type": "integer"},
                    "d_T2_T3": {"type": "number"},
                    "ratio": {"type": "number"},
                    "seconds": {"type": "number"},
                },
            },
        },
    },
}


def _sample_tori(n: int, c: float, seeds) -> dict:
    return {
        "T2": generate_torus2(ToriConfig(c=1.0, n_points=n, seed=seeds[0]), name="T2"),
        "T2Sc": generate_torus2(ToriConfig(c=c, n_points=n, seed=seeds[1]), name="T2Sc"),
        "T3": generate_torus3(ToriConfig(c=1.0, n_points=n, seed=seeds[2]), name="T3"),
        "T3Sc": generate_torus3(ToriConfig(c=c, n_points=n, seed=seeds[3]), name="T3Sc"),
    }


def _spawn_seeds(base: int, *key) -> list:
    ss = np.random.SeedSequence([base, *key])
    return [int(s.generate_state(1, dtype=np.uint32)[0]) for s in ss.spawn(4)]


def tori_trial(cfg: RunConfig, c: float, n_points: int, trial: int, t_grid=None):
    """Distances between the four tori of one trial.

    Returns ``(les, imd, seconds)`` where ``les`` and ``imd`` map each pair
    label of :data:`PAIRS` to a distance and ``seconds`` lists the time
    spent on each of the four spectra.
    """
    clouds = _sample_tori(n_points, c, _spawn_seeds(cfg.seed, int(round(c * 1e6)), n_points, trial))
    spectra, descs, seconds = {}, {}, []
    for name, cloud in clouds.items():
        t0 = time.perf_counter()
        spec, _ = compute_spectrum(cloud, cfg)
        descs[name] = les_descriptor(spec, cfg.gamma, name=name, seed=cfg.seed,
                                     sigma_multiplier=cfg.sigma_multiplier)
        seconds.append(time.perf_counter() - t0)
        spectra[name] = spec
    les, imd = {}, {}
    for a, b in itertools.combinations(SHAPES, 2):
        les[f"{a}|{b}"] = les_distance(descs[a], descs[b])
        imd[f"{a}|{b}"] = imd_approx(spectra[a], spectra[b], t_grid=t_grid)
    return les, imd, seconds


def tori_benchmark(cfg: RunConfig, c_grid: Sequence[float] = (1.0, 0.8, 0.6, 0.4, 0.2),
                   n_points: int = 1000, trials: int = 10,
                   n_sweep: Sequence[int] = (), t_grid=None) -> dict:
    """Run the tori sweep and return a JSON-serialisable report.

    See :data:`REPORT_SCHEMA` for the layout.
    """
    c_grid = [float(c) for c in c_grid]
    if not c_grid or any(not 0 < c <= 1 for c in c_grid):
        raise ConfigurationError("c_grid values must lie in (0, 1]")
    if trials < 1:
        raise ConfigurationError("trials must be positive")
    start = time.perf_counter()
    per_method = {m: {p: np.zeros((len(c_grid), trials)) for p in PAIRS} for m in METHODS}
    all_seconds = []
    for ci, c in enumerate(c_grid):
        for t in range(trials):
            les, imd, secs = tori_trial(cfg, c, n_points, t, t_grid)
            all_seconds.extend(secs)
            for p in PAIRS:
                per_method["les"][p][ci, t] = les[p]
                per_method["imd_approx"][p][ci, t] = imd[p]

    results = {
        m: {p: {"mean": arr.mean(axis=1).tolist(), "std": arr.std(axis=1).tolist()}
            for p, arr in table.items()}
        for m, table in per_method.items()
    }

    stability = []
    if n_sweep:
        sizes = sorted(int(n) for n in n_sweep)
        rows = []
        for n in sizes:
            t0 = time.perf_counter()
            vals = [tori_trial(cfg, 1.0, n, t, t_grid)[0]["T2|T3"] for t in range(trials)]
            rows.append((n, float(np.mean(vals)), (time.perf_counter() - t0) / trials))
        ref = rows[-1][1]
        stability = [{"n": n, "d_T2_T3": d, "ratio": d / ref, "seconds": s} for n, d, s in rows]

    config = {
        "k": cfg.k, "m": cfg.m, "gamma": cfg.gamma, "sigma_multiplier": cfg.sigma_multiplier,
        "seed": cfg.seed, "mode": cfg.mode, "exact_threshold": cfg.exact_threshold,
    }
    return {
        "schema": REPORT_SCHEMA_ID,
        "config": config,
        "c_grid": c_grid,
        "n_points": int(n_points),
        "trials": int(trials),
        "pairs": list(PAIRS),
        "results": results,
        "timings": {
            "descriptor_seconds_mean": float(np.mean(all_seconds)),
            "total_seconds": time.perf_counter() - start,
        },
        "stability": stability,
    }
