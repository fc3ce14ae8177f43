"""Exact classical bias and optimal-vertex enumeration against the double-loop oracle."""

from fractions import Fraction

import numpy as np
import pytest

from tightbell import (
    bias_of_strategy,
    classical_bias,
    make_named,
    optimal_vertices,
    verify_F_relation,
)
from tightbell.classical import OptimalVertexSet
from tightbell.errors import TooLarge, Truncated
from tightbell.game import DeterministicStrategy, build_game

from .generators import random_game, random_strategy
from .oracles import oracle_bias

Q = Fraction(1, 4)


def chsh():
    return make_named("chsh")


def test_chsh_bias():
    res = classical_bias(chsh())
    assert res.xi_c == Fraction(1, 2)
    assert bias_of_strategy(chsh(), res.witness) == Fraction(1, 2)
    assert res.num_alpha_optimal == 4
    assert not res.swapped


@pytest.mark.parametrize("n", [1, 2, 3])
def test_identity_bias_is_one(n):
    g = make_named("identity", n)
    res = classical_bias(g)
    assert res.xi_c == 1
    assert res.witness.alpha == (1,) * 2**n
    assert res.witness.beta == (1,) * 2**n


@pytest.mark.parametrize("n", [2, 3])
def test_appendix_d_bias_formula(n):
    g = make_named("appendix_d", n)
    assert classical_bias(g).xi_c == Fraction(2**n, 3 * 2**n - 4)


def test_oracle_equivalence_small_random():
    rng = np.random.default_rng(101)
    for _ in range(30):
        g = random_game(rng, max_a=6, max_b=5)
        assert classical_bias(g).xi_c == oracle_bias(g)[0]


def test_enumeration_side_swap():
    rng = np.random.default_rng(13)
    g = random_game(rng, min_a=6, max_a=7, min_b=2, max_b=3)  # m_a > m_b
    res = classical_bias(g)
    assert res.swapped
    assert res.xi_c == oracle_bias(g)[0]
    assert bias_of_strategy(g, res.witness) == res.xi_c


def test_sign_symmetry():
    rng = np.random.default_rng(17)
    for _ in range(20):
        g = random_game(rng, max_a=5, max_b=5)
        s = random_strategy(rng, g.m_a, g.m_b)
        neg = DeterministicStrategy(
            alpha=tuple(-a for a in s.alpha), beta=tuple(-b for b in s.beta)
        )
        assert bias_of_strategy(g, s) == bias_of_strategy(g, neg)


def test_positive_bias_for_exhaustive_games():
    rng = np.random.default_rng(23)
    for _ in range(40):
        g = random_game(rng)
        assert classical_bias(g).xi_c > 0


def test_too_large():
    g = make_named("identity", 3)
    with pytest.raises(TooLarge):
        classical_bias(g, enum_cap=4)


# ---------------------------------------------------------------------------
# optimal vertex enumeration
# ---------------------------------------------------------------------------


def test_chsh_vertices_complete_with_zero_branching():
    vs = optimal_vertices(chsh())
    assert not vs.truncated
    assert len(vs.vertices) == 8
    xi, pairs = oracle_bias(chsh(), collect_pairs=True)
    assert {(v.alpha, v.beta) for v in vs.vertices} == set(pairs)
    # every optimal alpha has one tied coordinate; both completions must appear
    by_alpha = {}
    for v in vs.vertices:
        by_alpha.setdefault(v.alpha, set()).add(v.beta)
    assert all(len(betas) == 2 for betas in by_alpha.values())


def test_identity1_vertices():
    vs = optimal_vertices(make_named("identity", 1))
    assert {(v.alpha, v.beta) for v in vs.vertices} == {
        ((1, 1), (1, 1)),
        ((1, -1), (1, -1)),
        ((-1, 1), (-1, 1)),
        ((-1, -1), (-1, -1)),
    }


def test_appendix_d2_vertices():
    g = make_named("appendix_d", 2)
    vs = optimal_vertices(g)
    # the 6 balanced sign vectors (already closed under negation) paired with
    # themselves, plus the all-ones vector paired with its negation both ways
    assert len(vs.vertices) == 8
    xi = classical_bias(g).xi_c
    for v in vs.vertices:
        assert bias_of_strategy(g, v) == xi
    balanced = [v for v in vs.vertices if sum(v.alpha) == 0]
    assert len(balanced) == 6 and all(v.alpha == v.beta for v in balanced)
    uniform = [v for v in vs.vertices if sum(v.alpha) != 0]
    assert {(v.alpha, v.beta) for v in uniform} == {
        ((1,) * 4, (-1,) * 4),
        ((-1,) * 4, (1,) * 4),
    }


def test_vertices_match_oracle_on_random_games():
    rng = np.random.default_rng(31)
    for _ in range(15):
        g = random_game(rng, max_a=4, max_b=4)
        vs = optimal_vertices(g)
        assert not vs.truncated
        _, pairs = oracle_bias(g, collect_pairs=True)
        assert {(v.alpha, v.beta) for v in vs.vertices} == set(pairs)


def test_vertices_include_negations():
    rng = np.random.default_rng(37)
    g = random_game(rng, max_a=4, max_b=4)
    vs = optimal_vertices(g)
    have = {(v.alpha, v.beta) for v in vs.vertices}
    for alpha, beta in have:
        assert (tuple(-a for a in alpha), tuple(-b for b in beta)) in have


def test_truncation_flag_and_cap():
    vs = optimal_vertices(chsh(), cap=3)
    assert vs.truncated
    assert len(vs.vertices) == 3
    assert vs.cap == 3


# ---------------------------------------------------------------------------
# coupling-matrix relation
# ---------------------------------------------------------------------------


def test_f_relation_identity():
    g = make_named("identity", 2)
    vs = optimal_vertices(g)
    rep = verify_F_relation(vs, np.eye(4), tol=0.0)
    assert rep.all_pass and rep.max_residual == 0.0


def test_f_relation_appendix_d():
    g = make_named("appendix_d", 2)
    vs = optimal_vertices(g)
    F = np.eye(4) - 0.5 * np.ones((4, 4))
    rep = verify_F_relation(vs, F)
    assert rep.all_pass and rep.max_residual == 0.0


def test_f_relation_fails_for_chsh():
    # one optimal alpha has two optimal betas, so no linear map can work
    vs = optimal_vertices(chsh())
    for F in (np.eye(2), np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)):
        assert not verify_F_relation(vs, F).all_pass


def test_f_relation_refuses_truncated_sets():
    vs = OptimalVertexSet(vertices=(), truncated=True, cap=1)
    with pytest.raises(Truncated):
        verify_F_relation(vs, np.eye(2))


def test_thread_count_does_not_change_results(monkeypatch):
    # both sides >= 15 so the 2^15 patterns span multiple enumeration blocks
    rng = np.random.default_rng(59)
    g = random_game(rng, min_a=15, max_a=15, min_b=15, max_b=16)
    baseline = classical_bias(g)
    base_vs = optimal_vertices(g)
    for workers in ("1", "3", "8"):
        monkeypatch.setenv("TIGHTBELL_THREADS", workers)
        res = classical_bias(g)
        assert res == baseline
        assert optimal_vertices(g) == base_vs


def test_object_dtype_fallback_for_huge_denominators():
    # denominator large enough to force the exact big-integer path
    big = 2**70
    q = [[Fraction(1, big), Fraction(big - 1, big)], [Fraction(0), Fraction(0)]]
    g = build_game(q, [[0, 1], [0, 0]])
    assert classical_bias(g).xi_c == oracle_bias(g)[0]
