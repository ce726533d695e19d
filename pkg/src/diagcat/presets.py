"""Named experiment configurations ``fig1`` to ``fig10``.

Sizes are chosen to finish on a laptop. Where a smaller system or a fixed-n
method stands in for a larger or thermodynamic-limit calculation, the
``note`` field says so.
"""

from __future__ import annotations

import copy

PRESETS: dict[str, dict] = {
    "fig1": {
        "note": "mean-field phase diagram, p=3; coarse c and lambda grids",
        "experiment": {"kind": "phase_diagram"},
        "model": {"name": "pspin", "p": 3},
        "grid": {
            "c": [0.6, 0.7, 0.8, 0.9, 1.0],
            "lambda": [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0],
            "s_points": 513,
        },
        "analysis": {"theta": 0.05},
    },
    "fig2": {
        "note": "lambda* versus c at p=3 from finite n=60 Dicke sectors instead of the n -> infinity fluctuation method; c snaps to multiples of 1/60",
        "experiment": {"kind": "lambda_star"},
        "model": {"name": "pspin_sector", "p": 3, "n": 60},
        "grid": {"c": [0.8, 0.9, 0.93, 0.96, 0.99], "lambda": [1.5, 1.7, 1.9, 2.1, 2.3, 2.5, 2.7], "s_points": 97},
    },
    "fig3": {
        "note": "large-p exponent with the truncated oracle model, p=25, n up to 80",
        "experiment": {"kind": "scaling_fit"},
        "model": {"name": "large_p", "variant": "truncated", "p": 25},
        "grid": {"lambda": [2.0, 4.0], "n": [40, 50, 60, 70, 80], "s_points": 129},
        "analysis": {"size_scaled": 0.5, "size_scaled_n": [20, 30, 40, 60]},
    },
    "fig4": {
        "note": "spectrum of the weak-strong instance at n=40, with and without the catalyst",
        "experiment": {"kind": "gap_trace"},
        "model": {"name": "weak_strong_sector", "n": 40, "c": 0.6, "h1": 1.0, "h2": 0.49},
        "schedule": [
            {"label": "standard", "kind": "standard"},
            {"label": "dc", "kind": "catalyst", "lambda": 1.0},
        ],
        "grid": {"s_points": 129},
    },
    "fig5": {
        "note": "semiclassical trajectory of the weak-strong cluster",
        "experiment": {"kind": "trajectory"},
        "model": {"name": "weak_strong", "c": 0.6, "h1": 1.0, "h2": 0.49},
        "schedule": [{"label": "dc", "kind": "catalyst", "lambda": 1.0}],
        "grid": {"s_points": 201},
    },
    "fig6": {
        "note": "exact gaps of the n=6, R=4 loop gadget with and without the catalyst",
        "experiment": {"kind": "gap_trace"},
        "model": {"name": "loop_gadget", "n": 6, "R": 4.0, "variant": "field_crossing"},
        "schedule": [
            {"label": "standard", "kind": "standard"},
            {"label": "dc", "kind": "catalyst", "lambda": 1.0, "bias": "minus"},
        ],
        "grid": {"s_points": 257},
        "analysis": {"pt_compare": True},
    },
    "fig7": {
        "note": "mean-field landscapes at the transition point (or the steepest point when absent)",
        "experiment": {"kind": "landscape"},
        "model": {"name": "pspin", "p": 3, "c": 0.8},
        "grid": {"lambda": [0.0, 0.5, 0.97], "s_points": 513},
    },
    "fig8": {
        "note": "finite-size convergence of the minimum gap at c=0.9 near lambda*",
        "experiment": {"kind": "extrapolation"},
        "model": {"name": "pspin_sector", "p": 3, "c": 0.9},
        "schedule": [{"label": "dc", "kind": "catalyst", "lambda": 2.19}],
        "grid": {"n": [40, 80, 120, 160, 200], "s_points": 97},
    },
    "fig9": {
        "note": "gap minima near lambda* at n=100 for three agreement fractions",
        "experiment": {"kind": "gap_structure"},
        "model": {"name": "pspin_sector", "p": 3, "n": 100},
        "grid": {"c": [0.9, 0.96, 0.99], "lambda": [2.0, 2.1, 2.2, 2.3], "s_points": 129},
        "analysis": {"window": [0.15, 0.5], "prominence": 1e-4},
    },
    "fig10": {
        "note": "semiclassical m^z of the wrongly biased cluster at c=0.99, lambda near lambda* (n=100 estimate)",
        "experiment": {"kind": "trajectory"},
        "model": {"name": "pspin", "p": 3, "c": 0.99},
        "schedule": [{"label": "dc", "kind": "catalyst", "lambda": 2.25}],
        "grid": {"s_points": 401, "s_min": 0.0, "s_max": 1.0},
        "analysis": {"feature": True},
    },
}


def list_presets() -> list[tuple[str, str]]:
    return [(name, PRESETS[name]["note"]) for name in sorted(PRESETS, key=lambda k: int(k[3:]))]


def get_preset(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; see list-presets")
    cfg = copy.deepcopy(PRESETS[name])
    cfg.pop("note")
    cfg["experiment"].setdefault("label", name)
    return cfg
