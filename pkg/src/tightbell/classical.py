"""Exact classical bias by exhaustive strategy enumeration.

For a fixed sign vector ``alpha`` of the enumerated player, the best response
is forced: ``beta_y = sign((Phi^T alpha)_y)``, so the classical bias is
``max_alpha sum_y |(Phi^T alpha)_y|``.  We always enumerate the smaller side
(transposing the game if needed) and keep everything exact by clearing the
common denominator of Phi and working in integers: sign patterns are expanded
from bit patterns in blocks and multiplied through the scaled integer matrix
with int64 matmuls, which are exact at these magnitudes (an object-dtype
fallback covers enormous denominators).

Ties matter for face geometry.  Wherever ``(Phi^T alpha)_y = 0`` both signs of
``beta_y`` are optimal, and `optimal_vertices` branches over *all* such
completions: dropping tied responses would under-measure the dimension of the
optimal face.  Block results are merged deterministically (max value, then
lowest bit pattern, where bit j = 0 encodes +1), so output is bit-identical
regardless of the worker-thread count (capped by ``TIGHTBELL_THREADS``).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import ShapeMismatch, TooLarge, Truncated
from .game import DeterministicStrategy, XorGame, game_matrix, transpose_game

DEFAULT_ENUM_CAP = 1 << 24  # alpha patterns
DEFAULT_VERTEX_CAP = 10**6  # stored optimal vertices
_BLOCK = 1 << 14
_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class ClassicalBiasResult:
    """Exact optimum with one witness strategy.

    ``num_alpha_optimal`` counts optimal sign vectors on the enumerated side;
    ``swapped`` records whether that side was Bob's (min-side normalization).
    """

    xi_c: Fraction
    witness: DeterministicStrategy
    num_alpha_optimal: int
    swapped: bool


@dataclass(frozen=True)
class OptimalVertexSet:
    """All deterministic strategies achieving the classical optimum.

    When ``truncated`` is False the list is complete, including every sign
    choice on tied (zero) coordinates and both (alpha, beta) and its negation.
    """

    vertices: tuple[DeterministicStrategy, ...]
    truncated: bool
    cap: int


@dataclass(frozen=True)
class FRelationReport:
    max_residual: float
    all_pass: bool


def _workers() -> int:
    env = os.environ.get("TIGHTBELL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            return 1
    return min(4, os.cpu_count() or 1)


def _scaled_int_phi(g: XorGame) -> tuple[np.ndarray, int, bool]:
    """Phi cleared of denominators, as an integer array.

    Returns (matrix, denominator L, object_dtype) with matrix = L * Phi.
    """
    phi = game_matrix(g).phi
    L = 1
    for row in phi:
        for v in row:
            L = lcm(L, v.denominator)
    ints = [[int(v * L) for v in row] for row in phi]
    # worst-case |alpha . column| * m_b must stay clear of int64 overflow
    bound = g.m_a * g.m_b * max(max(abs(v) for v in row) for row in ints)
    if bound < _INT64_SAFE:
        return np.array(ints, dtype=np.int64), L, False
    return np.array(ints, dtype=object), L, True


def _sign_block(lo: int, hi: int, m: int, obj: bool) -> np.ndarray:
    """Rows of +-1 signs for bit patterns lo..hi-1 (bit j = 0 means +1)."""
    pats = np.arange(lo, hi, dtype=np.int64)
    bits = (pats[:, None] >> np.arange(m, dtype=np.int64)) & 1
    signs = 1 - 2 * bits
    return signs.astype(object) if obj else signs


def _orient(g: XorGame) -> tuple[XorGame, bool]:
    """Make Alice the smaller side, so she is the enumerated player."""
    if g.m_a <= g.m_b:
        return g, False
    return transpose_game(g), True


def _enumerate_best(g: XorGame, enum_cap: int):
    """(best scaled value, count, first pattern, P, L, obj, swapped)."""
    gg, swapped = _orient(g)
    m = gg.m_a
    total = 1 << m
    if total > enum_cap:
        raise TooLarge(
            f"enumeration side has {m} inputs (2^{m} patterns > cap {enum_cap})"
        )
    P, L, obj = _scaled_int_phi(gg)

    def scan(span):
        lo, hi = span
        S = _sign_block(lo, hi, m, obj)
        vals = np.abs(S.dot(P)).sum(axis=1)  # .dot: exact for int64 and object
        best = vals.max()
        where = np.nonzero(vals == best)[0]
        return int(best), len(where), lo + int(where[0])

    spans = [(lo, min(lo + _BLOCK, total)) for lo in range(0, total, _BLOCK)]
    nw = _workers()
    if nw > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            parts = list(pool.map(scan, spans))
    else:
        parts = [scan(s) for s in spans]

    best = max(p[0] for p in parts)
    count = sum(p[1] for p in parts if p[0] == best)
    first = min(p[2] for p in parts if p[0] == best)
    return best, count, first, P, L, obj, swapped, gg


def _pattern_signs(pattern: int, m: int) -> tuple[int, ...]:
    return tuple(1 - 2 * ((pattern >> j) & 1) for j in range(m))


def _strategy(alpha, beta, swapped: bool) -> DeterministicStrategy:
    if swapped:
        alpha, beta = beta, alpha
    return DeterministicStrategy(alpha=tuple(alpha), beta=tuple(beta))


def classical_bias(g: XorGame, enum_cap: int = DEFAULT_ENUM_CAP) -> ClassicalBiasResult:
    """Exact maximum bias over deterministic strategy pairs.

    The witness takes ``beta_y = sign((Phi^T alpha)_y)`` with ties broken
    to +1 and the lexicographically first optimal alpha (all-ones first).
    """
    best, count, first, P, L, _obj, swapped, gg = _enumerate_best(g, enum_cap)
    alpha = _pattern_signs(first, gg.m_a)
    col = [sum(a * int(P[x][y]) for x, a in enumerate(alpha)) for y in range(gg.m_b)]
    beta = tuple(1 if v >= 0 else -1 for v in col)
    return ClassicalBiasResult(
        xi_c=Fraction(int(best), L),
        witness=_strategy(alpha, beta, swapped),
        num_alpha_optimal=count,
        swapped=swapped,
    )


def optimal_vertices(
    g: XorGame,
    cap: int = DEFAULT_VERTEX_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> OptimalVertexSet:
    """Enumerate every optimal deterministic strategy pair.

    Branches over all sign completions on zero coordinates of ``Phi^T alpha``;
    stops and marks the set truncated once ``cap`` vertices are stored.
    """
    best, _count, _first, P, L, obj, swapped, gg = _enumerate_best(g, enum_cap)
    m, mb = gg.m_a, gg.m_b
    total = 1 << m
    vertices: list[DeterministicStrategy] = []
    truncated = False

    for lo in range(0, total, _BLOCK):
        hi = min(lo + _BLOCK, total)
        S = _sign_block(lo, hi, m, obj)
        T = S.dot(P)
        vals = np.abs(T).sum(axis=1)
        for idx in np.nonzero(vals == best)[0]:
            alpha = _pattern_signs(lo + int(idx), m)
            row = [int(v) for v in T[idx]]
            zeros = [y for y in range(mb) if row[y] == 0]
            base = [1 if v >= 0 else -1 for v in row]
            for fill in range(1 << len(zeros)):
                if len(vertices) >= cap:
                    truncated = True
                    break
                beta = list(base)
                for j, y in enumerate(zeros):
                    beta[y] = 1 - 2 * ((fill >> j) & 1)
                vertices.append(_strategy(alpha, beta, swapped))
            if truncated:
                break
        if truncated:
            break
    return OptimalVertexSet(vertices=tuple(vertices), truncated=truncated, cap=cap)


def verify_F_relation(
    vs: OptimalVertexSet, F, tol: float = 1e-6
) -> FRelationReport:
    """Check ``beta = F alpha`` across a complete optimal vertex set.

    Raises Truncated on incomplete sets: a universally quantified claim
    cannot be certified from a partial enumeration.
    """
    if vs.truncated:
        raise Truncated("vertex set is truncated; relation cannot be certified")
    if not vs.vertices:
        return FRelationReport(max_residual=0.0, all_pass=True)
    Fm = np.asarray(F, dtype=float)
    v0 = vs.vertices[0]
    if Fm.shape != (len(v0.beta), len(v0.alpha)):
        raise ShapeMismatch(
            f"F must be {len(v0.beta)}x{len(v0.alpha)}, got {Fm.shape}"
        )
    worst = 0.0
    for v in vs.vertices:
        res = np.abs(np.array(v.beta, dtype=float) - Fm @ np.array(v.alpha, dtype=float)).max()
        worst = max(worst, float(res))
    return FRelationReport(max_residual=worst, all_pass=worst <= tol)
