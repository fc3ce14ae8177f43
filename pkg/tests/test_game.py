"""Game construction, named families, reductions, behaviours, file format."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tightbell import (
    behaviour_of_strategy,
    bias_of_behaviour,
    bias_of_strategy,
    build_game,
    game_matrix,
    make_named,
    ns_perfect_behaviour,
    probability_table,
    reduce_exhaustive,
    transpose_game,
)
from tightbell.errors import (
    EmptyGame,
    GameFormatError,
    InvalidParameter,
    NegativePrior,
    NotNormalized,
    ShapeMismatch,
    UnknownName,
)
from tightbell.game import (
    Behaviour,
    DeterministicStrategy,
    game_from_dict,
    game_to_dict,
    lift_strategy,
    load_game,
    save_game,
)

from .generators import random_game, random_strategy
from .oracles import oracle_is_no_signalling

H = Fraction(1, 2)
Q = Fraction(1, 4)


def chsh():
    return build_game([[Q, Q], [Q, Q]], [[0, 0], [0, 1]])


# ---------------------------------------------------------------------------
# build_game / game_matrix
# ---------------------------------------------------------------------------


def test_build_single_entry():
    g = build_game([[1]], [[0]])
    assert (g.m_a, g.m_b) == (1, 1)
    assert game_matrix(g).phi == ((Fraction(1),),)


def test_build_chsh_matches_named():
    assert chsh() == make_named("chsh")


def test_build_accepts_rational_strings():
    g = build_game([["1/2", "0.5"]], [[0, 0]])
    assert g.q == ((H, H),)


def test_build_rejects_floats():
    with pytest.raises(GameFormatError):
        build_game([[0.5, 0.5]], [[0, 0]])


def test_build_validation_errors():
    with pytest.raises(ShapeMismatch):
        build_game([[H, H]], [[0]])
    with pytest.raises(ShapeMismatch):
        build_game([[H, H]], [[0, 2]])
    with pytest.raises(NegativePrior):
        build_game([[Fraction(3, 2), Fraction(-1, 2)]], [[0, 0]])
    with pytest.raises(NotNormalized):
        build_game([[H, Q]], [[0, 0]])
    # appending zero rows keeps validity as long as the sum stays 1
    g = build_game([[H, H], [0, 0]], [[0, 0], [0, 0]])
    assert g.m_a == 2


def test_game_matrix_chsh():
    phi = game_matrix(chsh()).phi
    assert phi == ((Q, Q), (Q, -Q))


def test_game_matrix_no_flips_equals_q():
    g = build_game([[H, Q], [Q, 0]], [[0, 0], [0, 0]])
    assert game_matrix(g).phi == g.q


def test_game_matrix_single_negative():
    g = build_game([[1]], [[1]])
    assert game_matrix(g).phi == ((Fraction(-1),),)


def test_abs_phi_sums_to_one_on_random_games():
    rng = np.random.default_rng(11)
    for _ in range(25):
        g = random_game(rng)
        assert sum(abs(v) for row in game_matrix(g).phi for v in row) == 1


# ---------------------------------------------------------------------------
# reduce_exhaustive / lifting
# ---------------------------------------------------------------------------


def test_reduce_identity_on_exhaustive():
    g = chsh()
    red, rmap = reduce_exhaustive(g)
    assert red == g
    assert rmap.kept_rows == (0, 1) and rmap.kept_cols == (0, 1)
    assert rmap.original_dims == (2, 2)


def test_reduce_drops_zero_row():
    g = build_game([[H, 0], [H, 0], [0, 0]], [[0, 0], [1, 0], [0, 0]])
    red, rmap = reduce_exhaustive(g)
    assert (red.m_a, red.m_b) == (2, 1)
    assert rmap.kept_rows == (0, 1)
    assert rmap.kept_cols == (0,)


def test_reduce_rejects_all_zero():
    from tightbell.game import XorGame

    g = XorGame(m_a=1, m_b=1, q=((Fraction(0),),), f=((0,),))
    with pytest.raises(EmptyGame):
        reduce_exhaustive(g)


def test_padded_chsh_roundtrip_and_bias_lift():
    base = chsh()
    q = [[Q, Q, 0], [Q, Q, 0], [0, 0, 0]]
    f = [[0, 0, 0], [0, 1, 0], [0, 0, 0]]
    padded = build_game(q, f)
    red, rmap = reduce_exhaustive(padded)
    assert red == base
    assert rmap.original_dims == (3, 3)
    rng = np.random.default_rng(5)
    for _ in range(20):
        s = random_strategy(rng, red.m_a, red.m_b)
        for fa in ((1,), (-1,)):
            for fb in ((1,), (-1,)):
                lifted = lift_strategy(s, rmap, fa, fb)
                assert bias_of_strategy(padded, lifted) == bias_of_strategy(red, s)


# ---------------------------------------------------------------------------
# behaviours and biases
# ---------------------------------------------------------------------------


def test_bias_examples():
    g = chsh()
    ones = Behaviour(alpha=(0, 0), beta=(0, 0), c=((1, 1), (1, -1)))
    assert bias_of_behaviour(g, ones) == 1
    zero = Behaviour(alpha=(0, 0), beta=(0, 0), c=((0, 0), (0, 0)))
    assert bias_of_behaviour(g, zero) == 0
    s = DeterministicStrategy(alpha=(1, 1), beta=(1, 1))
    assert bias_of_strategy(g, s) == H


def test_bias_shape_mismatch():
    g = chsh()
    with pytest.raises(ShapeMismatch):
        bias_of_behaviour(g, Behaviour(alpha=(0,), beta=(0, 0), c=((0, 0),)))


def test_behaviour_of_strategy_outer_product():
    b = behaviour_of_strategy(DeterministicStrategy(alpha=(1, 1), beta=(1, -1)))
    assert b.c == ((1, -1), (1, -1))
    single = behaviour_of_strategy(DeterministicStrategy(alpha=(1,), beta=(1,)))
    assert single.c == ((1,),)


def test_behaviour_negation_keeps_correlators():
    s = DeterministicStrategy(alpha=(1, -1), beta=(-1, 1))
    neg = DeterministicStrategy(
        alpha=tuple(-a for a in s.alpha), beta=tuple(-b for b in s.beta)
    )
    b, bn = behaviour_of_strategy(s), behaviour_of_strategy(neg)
    assert b.c == bn.c
    assert bn.alpha == tuple(-a for a in b.alpha)


def test_deterministic_probabilities_valid():
    rng = np.random.default_rng(3)
    for _ in range(10):
        s = random_strategy(rng, 3, 2)
        table = probability_table(behaviour_of_strategy(s))
        for x in range(3):
            for y in range(2):
                cell = table[x][y]
                flat = [cell[a][b] for a in (0, 1) for b in (0, 1)]
                assert all(v >= 0 for v in flat)
                assert sum(flat) == 1


def test_ns_perfect_examples():
    g = chsh()
    beh = ns_perfect_behaviour(g)
    assert beh.alpha == (0, 0) and beh.beta == (0, 0)
    assert beh.c == ((1, 1), (1, -1))
    assert bias_of_behaviour(g, beh) == 1

    allzero = build_game([[H, H]], [[0, 0]])
    assert ns_perfect_behaviour(allzero).c == ((1, 1),)

    neg = build_game([[1]], [[1]])
    assert ns_perfect_behaviour(neg).c == ((-1,),)


def test_ns_perfect_random_games_exact():
    rng = np.random.default_rng(7)
    for _ in range(30):
        g = random_game(rng)
        beh = ns_perfect_behaviour(g)
        assert bias_of_behaviour(g, beh) == 1
        assert oracle_is_no_signalling(beh)


# ---------------------------------------------------------------------------
# named families
# ---------------------------------------------------------------------------


def test_identity_family():
    g = make_named("identity", 1)
    assert game_matrix(g).phi == ((H, Fraction(0)), (Fraction(0), H))
    g2 = make_named("identity", 2)
    assert g2.m_a == 4
    assert sum(abs(v) for row in game_matrix(g2).phi for v in row) == 1


def test_appendix_d_family():
    g = make_named("appendix_d", 2)
    phi = game_matrix(g).phi
    lam = Fraction(1, 8)
    for i in range(4):
        for j in range(4):
            assert phi[i][j] == (lam / 2 if i == j else -lam / 2)
    assert sum(abs(v) for row in phi for v in row) == 1


def test_appendix_d_eigenstructure():
    # +lam on the complement of the all-ones vector, -lam on it
    g = make_named("appendix_d", 3)
    phi = game_matrix(g).phi
    lam = Fraction(1, 20)
    ones = [1] * 8
    assert [sum(phi[i][j] * ones[j] for j in range(8)) for i in range(8)] == [-lam] * 8
    balanced = [1, 1, 1, 1, -1, -1, -1, -1]
    assert [
        sum(phi[i][j] * balanced[j] for j in range(8)) for i in range(8)
    ] == [lam * v for v in balanced]


def test_named_errors():
    with pytest.raises(UnknownName):
        make_named("nosuch")
    with pytest.raises(InvalidParameter):
        make_named("identity", 0)
    with pytest.raises(InvalidParameter):
        make_named("appendix_d", 1)
    with pytest.raises(InvalidParameter):
        make_named("identity")


def test_transpose_game():
    g = build_game([[H, Q, Q]], [[0, 1, 0]])
    gt = transpose_game(g)
    assert (gt.m_a, gt.m_b) == (3, 1)
    assert game_matrix(gt).phi == tuple(zip(*game_matrix(g).phi))


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def test_game_file_roundtrip(tmp_path):
    g = make_named("appendix_d", 2)
    path = tmp_path / "game.json"
    save_game(g, path)
    assert load_game(path) == g


def test_game_dict_requires_format():
    with pytest.raises(GameFormatError):
        game_from_dict({"m_a": 1, "m_b": 1, "q": [["1"]], "f": [[0]]})
    d = game_to_dict(chsh())
    d["m_a"] = 3
    with pytest.raises(GameFormatError):
        game_from_dict(d)


@settings(max_examples=40, deadline=None)
@given(
    rows=st.integers(1, 3),
    cols=st.integers(1, 3),
    seed=st.integers(0, 2**31),
)
def test_serialization_roundtrip_random(rows, cols, seed):
    rng = np.random.default_rng(seed)
    g = random_game(rng, max_a=rows, max_b=cols, min_a=rows, min_b=cols)
    assert game_from_dict(game_to_dict(g)) == g


def test_behaviour_serialization_roundtrip():
    from tightbell.game import behaviour_from_dict, behaviour_to_dict

    beh = ns_perfect_behaviour(chsh())
    d = behaviour_to_dict(beh)
    assert d["format"] == "tightbell-behaviour-v1"
    assert d["c"] == [[1.0, 1.0], [1.0, -1.0]]
    back = behaviour_from_dict(d)
    assert back.alpha == (0.0, 0.0)
    assert back.c == ((1.0, 1.0), (1.0, -1.0))
    with pytest.raises(GameFormatError):
        behaviour_from_dict({"alpha": [0], "beta": [0], "c": [[1]]})
