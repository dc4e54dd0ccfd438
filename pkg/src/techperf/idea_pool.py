"""Operations regime: a pool of individual operating ideas that grows by
probabilistic pairwise combination.

Every idea is identified by its ancestor set, the set of basic ideas it
embodies. Ancestor sets are stored as Python ``int`` bitmasks (bit ``i`` set
means basic idea ``i`` is used), so the width grows with the number of basic
ideas and there is no fixed 64-bit ceiling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as _k

__all__ = [
    "IdeaPool",
    "new_pool",
    "combination_limit",
    "attempt_combination",
    "step",
    "inject_basic",
    "theoretical_rate",
    "ancestor_indices",
    "find_partner",
]


def ancestor_indices(mask: int) -> frozenset[int]:
    """Decode an ancestor bitmask into the set of basic-idea indices."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def combination_limit(n_basic: int) -> int:
    """Number of distinct non-empty subsets of ``n_basic`` basic ideas."""
    n_basic = int(n_basic)
    if n_basic < 1:
        raise ValueError(f"n_basic must be >= 1, got {n_basic}")
    # Python ints do not wrap; anything that cannot be represented raises.
    return (1 << n_basic) - 1


def theoretical_rate(p_ioi: float) -> float:
    """Closed-form growth rate ``ln(1 + p/2)`` of an unconstrained pool."""
    if not 0.0 <= p_ioi <= 1.0:
        raise ValueError(f"p_ioi must lie in [0, 1], got {p_ioi}")
    return math.log1p(p_ioi / 2.0)


_WORD = 64
_WORD_MASK = (1 << _WORD) - 1

PAIRINGS = ("feasible", "uniform")


class _Store:
    """Array mirror of the pool: one uint64 column per 64-bit word of the
    ancestor masks, a per-idea "no legal partner" flag, and (while masks fit
    in one word) a hash set of realized masks for the compiled step."""

    def __init__(self, masks, n_basic):
        self.size = 0
        self.cap = max(16, 2 * len(masks))
        self.cols = [np.zeros(self.cap, dtype=np.uint64)
                     for _ in range(max(1, -(-n_basic // _WORD)))]
        self.dead = np.zeros(self.cap, dtype=np.bool_)
        self.hbits = 0
        self.htab = None
        for m in masks:
            self.append(m)

    @property
    def n_words(self) -> int:
        return len(self.cols)

    def split(self, mask: int) -> list[np.uint64]:
        return [np.uint64((mask >> (_WORD * w)) & _WORD_MASK) for w in range(self.n_words)]

    def widen(self, n_basic: int):
        while self.n_words < -(-n_basic // _WORD):
            self.cols.append(np.zeros(self.cap, dtype=np.uint64))
            self.htab = None

    def reserve(self, n: int):
        if n <= self.cap:
            return
        while self.cap < n:
            self.cap *= 2
        grow = self.cap - self.cols[0].size
        self.cols = [np.concatenate([c, np.zeros(grow, dtype=np.uint64)]) for c in self.cols]
        self.dead = np.concatenate([self.dead, np.zeros(grow, dtype=np.bool_)])

    def append(self, mask: int):
        self.reserve(self.size + 1)
        for w, v in enumerate(self.split(mask)):
            self.cols[w][self.size] = v
        self.dead[self.size] = False
        if self.htab is not None:
            self.hash_reserve(self.size + 1)
            _k.hash_insert(self.htab, self.hbits, np.uint64(mask))
        self.size += 1

    def hash_reserve(self, n: int):
        """Make the hash hold ``n`` keys at load <= 1/2 (single word only)."""
        if self.htab is not None and 2 * n <= self.htab.size:
            return
        bits = max(6, (2 * n - 1).bit_length())
        self.hbits = bits
        self.htab = _k.hash_build(self.cols[0][:self.size], bits)

    def disjoint_rows(self, n: int, mask: int) -> np.ndarray:
        """Indices ``< n`` whose ancestors do not intersect ``mask``."""
        return np.flatnonzero(self.disjoint(slice(0, n), mask))

    def disjoint(self, rows, mask: int) -> np.ndarray:
        parts = self.split(mask)
        acc = self.cols[0][rows] & parts[0]
        for c, v in zip(self.cols[1:], parts[1:]):
            if v:
                acc |= c[rows] & v
        return acc == 0


@dataclass
class IdeaPool:
    """Realized ideas plus the bookkeeping the reuse constraint needs.

    ``pairing`` selects how a successful attempt finds its pair.
    ``"feasible"``: the initiating idea is uniform among ideas that still have
    a legal partner (disjoint ancestors, union not yet realized) and the
    partner is uniform among its legal partners, so attempts go to waste only
    once the whole pool is exhausted. ``"uniform"``: both ideas are drawn
    uniformly and a blocked pair wastes the attempt. Without the reuse
    constraint the two coincide.
    """

    ideas: list[int]
    n_basic: int
    p_ioi: float
    reuse_constraint: bool = True
    pairing: str = "feasible"
    _realized: set[int] = field(default_factory=set, repr=False)
    _store: _Store | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.pairing not in PAIRINGS:
            raise ValueError(f"pairing must be one of {PAIRINGS}, got {self.pairing!r}")
        if not self._realized:
            self._realized = set(self.ideas)
        if self._store is None:
            self._store = _Store(self.ideas, self.n_basic)

    def _append(self, mask: int) -> int:
        self.ideas.append(mask)
        self._store.append(mask)
        return len(self.ideas) - 1

    @property
    def ioi_c(self) -> int:
        return len(self.ideas)

    @property
    def limit(self) -> int:
        return combination_limit(self.n_basic)

    @property
    def saturated(self) -> bool:
        return self.reuse_constraint and self.ioi_c >= self.limit

    def ancestors(self, index: int) -> frozenset[int]:
        return ancestor_indices(self.ideas[index])

    def copy(self) -> IdeaPool:
        out = IdeaPool(list(self.ideas), self.n_basic, self.p_ioi, self.reuse_constraint,
                       self.pairing, set(self._realized))
        out._store.dead[:self.ioi_c] = self._store.dead[:self.ioi_c]
        return out


def new_pool(n_basic: int, p_ioi: float, reuse_constraint: bool = True,
             pairing: str = "feasible") -> IdeaPool:
    n_basic = int(n_basic)
    if n_basic < 1:
        raise ValueError(f"a pool needs at least one basic idea, got {n_basic}")
    if not 0.0 <= p_ioi <= 1.0:
        raise ValueError(f"p_ioi must lie in [0, 1], got {p_ioi}")
    ideas = [1 << i for i in range(n_basic)]
    return IdeaPool(ideas, n_basic, float(p_ioi), bool(reuse_constraint), pairing)


def _try_merge(pool: IdeaPool, a: int, b: int) -> int | None:
    """Append the union of ideas ``a`` and ``b`` if the constraint allows it."""
    ma, mb = pool.ideas[a], pool.ideas[b]
    union = ma | mb
    if pool.reuse_constraint:
        if ma & mb or union in pool._realized:
            return None
        pool._realized.add(union)
    return pool._append(union)


def attempt_combination(pool: IdeaPool, a: int, b: int,
                        rng: np.random.Generator) -> int | None:
    """Try to combine ideas ``a`` and ``b``.

    One uniform draw is always consumed. Returns the index of the new idea,
    or ``None`` when the draw fails or the reuse constraint blocks the pair
    (overlapping ancestors, or the union already exists).
    """
    n = pool.ioi_c
    if a == b:
        raise ValueError("an idea cannot combine with itself")
    if not (0 <= a < n and 0 <= b < n):
        raise IndexError(f"idea indices ({a}, {b}) out of range for pool of {n}")
    if rng.random() >= pool.p_ioi:
        return None
    return _try_merge(pool, a, b)


def find_partner(pool: IdeaPool, a: int, n: int,
                 rng: np.random.Generator) -> int | None:
    """Uniformly random legal partner for idea ``a`` among the first ``n``
    ideas, or ``None`` when there is none.

    Disjoint ideas are gathered in one scan and sampled without replacement
    until one whose union with ``a`` is new turns up.
    """
    ma = pool.ideas[a]
    cand = pool._store.disjoint_rows(n, ma)
    m = cand.size
    while m:
        r = int(rng.integers(0, m))
        j = int(cand[r])
        if (ma | pool.ideas[j]) not in pool._realized:
            return j
        m -= 1
        cand[r] = cand[m]
    return None


def step(pool: IdeaPool, rng: np.random.Generator) -> int:
    """Run one time step of ``ioi_c // 2`` combination attempts.

    Only ideas present at the start of the step take part. Each attempt
    succeeds with probability ``p_ioi``; its initiating idea is uniform and
    the partner is chosen according to ``pool.pairing``. Returns the number
    of ideas created.
    """
    n = pool.ioi_c
    k = n // 2
    if k == 0:
        return 0
    if pool.pairing == "uniform" or not pool.reuse_constraint:
        a = rng.integers(0, n, size=k)
        b = rng.integers(0, n - 1, size=k)
        b += b >= a
        hits = np.flatnonzero(rng.random(k) < pool.p_ioi)
        return sum(_try_merge(pool, int(a[i]), int(b[i])) is not None for i in hits)

    hits = int(np.count_nonzero(rng.random(k) < pool.p_ioi))
    if hits == 0:
        return 0
    st = pool._store
    if st.n_words == 1:
        st.reserve(n + hits)
        st.hash_reserve(n + hits)
        size = _k.feasible_step(st.cols[0], n, hits, st.dead, st.htab, st.hbits, rng)
        st.size = size
        new = [int(x) for x in st.cols[0][n:size]]
        pool.ideas.extend(new)
        pool._realized.update(new)
        return size - n
    return _feasible_step_wide(pool, n, hits, rng)


def _feasible_step_wide(pool: IdeaPool, n: int, hits: int, rng: np.random.Generator) -> int:
    """Pure-numpy twin of the compiled step for masks wider than 64 bits."""
    dead = pool._store.dead
    alive = np.flatnonzero(~dead[:n])
    m = alive.size
    new = []
    for _ in range(hits):
        while m:
            r = int(rng.integers(0, m))
            ai = int(alive[r])
            j = find_partner(pool, ai, n, rng)
            if j is not None:
                new.append(_try_merge(pool, ai, j))
                break
            dead[ai] = True
            m -= 1
            alive[r] = alive[m]
        if not m:
            break
    if new:
        rows = np.flatnonzero(dead[:n])
        for i in new:
            if rows.size == 0:
                break
            hit = pool._store.disjoint(rows, pool.ideas[i])
            dead[rows[hit]] = False
            rows = rows[~hit]
    return len(new)


def inject_basic(pool: IdeaPool) -> int:
    """Add a new basic idea and return its index in ``pool.ideas``."""
    mask = 1 << pool.n_basic
    pool.n_basic += 1
    pool._store.widen(pool.n_basic)
    pool._realized.add(mask)
    # a fresh basic idea is disjoint from everything
    pool._store.dead[:pool.ioi_c] = False
    return pool._append(mask)
