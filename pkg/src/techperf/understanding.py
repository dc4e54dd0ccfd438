"""Understanding regime: scientific fields carrying fitness values that grow
by pairwise combination, bounded by the available operational tools."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "UnderstandingState",
    "init_fields",
    "sample_triangular",
    "triangular_pdf",
    "combine_step",
    "evolve",
]


@dataclass
class UnderstandingState:
    fitness: list[float]
    z_f: float = math.inf
    cap_rejections: int = 0

    @property
    def f_u(self) -> float:
        return math.fsum(self.fitness)

    @property
    def n_fields(self) -> int:
        return len(self.fitness)

    def copy(self) -> UnderstandingState:
        return UnderstandingState(list(self.fitness), self.z_f, self.cap_rejections)


def init_fields(n_fields: int, rng: np.random.Generator,
                z_f: float = math.inf) -> UnderstandingState:
    """Draw ``n_fields`` starting fitness values uniformly on [0, 1)."""
    if n_fields < 2:
        raise ValueError(f"need at least two fields to combine, got {n_fields}")
    if not z_f > 0:
        raise ValueError(f"z_f must be positive, got {z_f}")
    return UnderstandingState([float(x) for x in rng.random(int(n_fields))], z_f)


def triangular_pdf(x, f1: float, f2: float):
    """Density of the symmetric triangular law on [0, f1 + f2]."""
    top = f1 + f2
    if not top > 0:
        raise ValueError("f1 + f2 must be positive")
    x = np.asarray(x, dtype=float)
    peak = 2.0 / top
    mode = top / 2.0
    pdf = np.where(x <= mode, peak * x / mode, peak * (top - x) / (top - mode))
    return np.where((x < 0) | (x > top), 0.0, pdf)


def sample_triangular(f1: float, f2: float, rng: np.random.Generator) -> float:
    top = f1 + f2
    if not top > 0:
        raise ValueError(f"f1 + f2 must be positive, got {top}")
    return float(rng.triangular(0.0, top / 2.0, top))


RULES = ("weaker", "both")


def combine_step(state: UnderstandingState, cap: float,
                 rng: np.random.Generator, rule: str = "both") -> bool:
    """One combination attempt between two distinct random fields.

    A candidate is drawn from the triangular law on ``[0, f_i + f_j]`` and, if
    accepted, replaces the weaker of the two fields. ``rule="both"`` accepts
    only a candidate above both parents; ``"weaker"`` accepts one above the
    weaker parent. Candidates that would push the cumulative fitness over
    ``cap`` are rejected and counted in ``state.cap_rejections``.
    """
    if rule not in RULES:
        raise ValueError(f"rule must be one of {RULES}, got {rule!r}")
    n = state.n_fields
    i = int(rng.integers(0, n))
    j = int(rng.integers(0, n - 1))
    if j >= i:
        j += 1
    fit = state.fitness
    if fit[i] + fit[j] <= 0.0:
        return False
    cand = sample_triangular(fit[i], fit[j], rng)
    lo, hi = (i, j) if fit[i] <= fit[j] else (j, i)
    if cand <= fit[lo if rule == "weaker" else hi]:
        return False
    if state.f_u - fit[lo] + cand > cap:
        state.cap_rejections += 1
        return False
    fit[lo] = cand
    return True


def evolve(state: UnderstandingState, cap: float, rng: np.random.Generator,
           rule: str = "both") -> int:
    """Run one time step of ``n_fields // 2`` attempts; return replacements made."""
    return sum(combine_step(state, cap, rng, rule) for _ in range(state.n_fields // 2))
