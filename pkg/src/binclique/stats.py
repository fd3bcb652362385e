"""Reference bounds and small statistics helpers shared by the experiments."""

from __future__ import annotations

import csv
import io
import math
import random

import numpy as np

from .graph import derive_seed


def chernoff_upper(mu: float, delta: float) -> float:
    """Pr[X >= (1 + delta) mu] <= exp(-mu delta^2 / 3), for 0 <= delta <= 1."""
    if not 0 <= delta <= 1:
        raise ValueError("delta must lie in [0, 1]")
    return math.exp(-mu * delta * delta / 3)


def chernoff_lower(mu: float, delta: float) -> float:
    """Pr[X <= (1 - delta) mu] <= exp(-mu delta^2 / 2), for 0 <= delta <= 1."""
    if not 0 <= delta <= 1:
        raise ValueError("delta must lie in [0, 1]")
    return math.exp(-mu * delta * delta / 2)


def binomial_se(p: float, trials: int) -> float:
    p = min(max(p, 0.0), 1.0)
    return math.sqrt(p * (1 - p) / trials) if trials else 0.0


def within_bound(empirical: float, bound: float, trials: int, sigmas: float = 3.0) -> bool:
    """True unless ``empirical`` exceeds ``bound`` by more than ``sigmas`` SEs."""
    return empirical <= bound + sigmas * binomial_se(bound, trials) + 1e-12


def trial_rng(seed: int, trial: int) -> random.Random:
    return random.Random(derive_seed(seed, trial))


def np_rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *stream))


def rows_to_csv(rows: list[dict], header: list[str] | None = None,
                comments: list[str] | None = None) -> str:
    buf = io.StringIO()
    for c in comments or []:
        buf.write(f"# {c}\n")
    if rows:
        fields = header or list(rows[0])
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()
