import csv
import io
import json
import math
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pdakit import bench
from pdakit.bench import (
    eval_cjyt,
    eval_grouping,
    eval_mn,
    eval_partition,
    eval_scheme_a,
    eval_scheme_b,
    eval_scheme_c,
    eval_szg,
    eval_tr,
    inequality_holds,
    subpacketization_ratio_bound,
    tradeoff_table,
)
from pdakit.cartesian import downgrade_regular, theorem1_scheme, theorem2_scheme
from pdakit.constructions import ParameterError, mn_pda, near_square_pda, replicate_users, ytcc_pda
from pdakit.pda_core import compute_params

F_ = Fraction


def _matches(e, p):
    """SchemeEval fields against parameters measured on an actual array."""
    c = compute_params(p)
    assert (e.K, e.F, e.memory_ratio, e.load) == (c.K, c.F, c.memory_ratio, c.load)
    assert e.gain == c.mean_gain
    if c.regularity is not None:
        assert e.gain == c.regularity


# ---------------------------------------------------------------- closed forms

def test_mn_examples():
    e = eval_mn(10, 6)
    assert e.F == 210 and e.load == F_(4, 7)
    e = eval_mn(4, 2)
    assert e.load == F_(2, 3) and e.F == 6
    e = eval_mn(5, 3)
    assert e.gain == 4 and e.F == 10
    _matches(e, mn_pda(5, 3))
    with pytest.raises(ParameterError):
        eval_mn(4, 4)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_scheme_a_reference_rows(m):
    assert eval_scheme_a(8, 3, 2, m).tuple[:2] == (56 * m, F_(13, 28))
    e = eval_scheme_a(8, 3, 2, m)
    assert (e.load, e.F) == (5, 56 ** m)
    e = eval_scheme_a(11, 2, 1, m)
    assert (e.K, e.memory_ratio, e.load, e.F) == (165 * m, F_(31, 55), 9, 55 ** m)


def test_scheme_a_ratio_arithmetic():
    assert 1 - F_(comb(5, 2) * comb(3, 1), comb(8, 3)) == F_(13, 28)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_scheme_b_reference_rows(m):
    e = eval_scheme_b(6, m)
    assert (e.K, e.memory_ratio, e.load, e.F) == (24 * m, F_(3, 4), 1, 24 ** m)
    e = eval_scheme_b(7, m)
    assert (e.K, e.memory_ratio, e.load, e.F) == (32 * m, F_(25, 32), 1, 32 ** m)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_scheme_c_example_family(m):
    e = eval_scheme_c(5, 3, m)
    assert (e.K, e.memory_ratio, e.load, e.F) == (5 * m, F_(3, 5), F_(2, 3), 3 * 10 ** m)


def test_scheme_c_small():
    # z * C(q, z)^m with z = 1: the subpacketization is 2^3, not 2 * 2^3
    e = eval_scheme_c(2, 1, 3)
    assert (e.K, e.F, e.load) == (6, 8, 1)
    _matches(e, theorem2_scheme(mn_pda(2, 1), 3))


def test_grouping_examples():
    e = eval_grouping(8, 6, 3)
    assert (e.K, e.load, e.F) == (24, F_(6, 7), 28)
    assert eval_grouping(6, 2, 1).tuple == eval_mn(6, 2).tuple
    _matches(eval_grouping(4, 1, 3), replicate_users(mn_pda(4, 1), 3))


@given(st.integers(2, 40), st.data())
def test_scheme_c_gain_deficit(q, data):
    z = data.draw(st.integers(1, q - 1))
    m = data.draw(st.integers(2, 6))
    assert eval_mn(m * q, m * z).gain - eval_scheme_c(q, z, m).gain == 1


# ---------------------------------------------------------------- formula vs construction

@pytest.mark.parametrize("g,m", [(1, 2), (2, 2), (2, 3), (3, 2), (4, 2)])
def test_scheme_b_matches_construction(g, m):
    p, cert = near_square_pda(g)
    _matches(eval_scheme_b(g, m), theorem1_scheme(p, cert, m))


@pytest.mark.parametrize("H,b,r,m", [(4, 1, 0, 2), (5, 2, 1, 1), (5, 2, 1, 2), (6, 2, 1, 2), (6, 3, 1, 1)])
def test_scheme_a_matches_construction(H, b, r, m):
    p, cert = ytcc_pda(H, b + r, b, r)
    _matches(eval_scheme_a(H, b, r, m), theorem1_scheme(p, cert, m))


@pytest.mark.parametrize("q,z,m", [(3, 1, 2), (4, 2, 2), (5, 3, 2), (5, 2, 2), (3, 2, 3), (4, 1, 3)])
def test_scheme_c_matches_construction(q, z, m):
    _matches(eval_scheme_c(q, z, m), theorem2_scheme(mn_pda(q, z), m))


def test_scheme_c_m1_is_lowered_base():
    _matches(eval_scheme_c(5, 3, 1), downgrade_regular(mn_pda(5, 3))[0])


@pytest.mark.parametrize("K,t", [(q, t) for q in range(2, 8) for t in range(1, q)])
def test_mn_matches_construction(K, t):
    _matches(eval_mn(K, t), mn_pda(K, t))


# ---------------------------------------------------------------- other closed-form rows

def test_table_rows():
    e = eval_partition(2, 3, 1)
    assert (e.K, e.memory_ratio, e.load, e.F) == (9, F_(1, 3), 2, 9)
    e = eval_partition(2, 3, 2)
    assert (e.K, e.memory_ratio, e.load, e.F) == (9, F_(2, 3), F_(1, 2), 18)
    e = eval_szg(3, 2, 2, 1)
    assert (e.K, e.memory_ratio, e.load, e.F) == (12, F_(3, 4), 1, 8)
    e = eval_szg(3, 2, 2, 2)
    assert (e.K, e.memory_ratio, e.load, e.F) == (12, F_(3, 4), 1, 8)
    e = eval_cjyt(2, 4, 3, 1)
    assert (e.K, e.memory_ratio, e.gain, e.load, e.F) == (12, F_(3, 4), 9, F_(1, 3), 48)
    e = eval_tr(2, 3, 1, 2, 1)
    assert (e.K, e.memory_ratio, e.load, e.F) == (6, F_(1, 2), 1, 4)
    for bad in (lambda: eval_partition(1, 2, 3), lambda: eval_tr(3, 3, 1, 2, 1),
                lambda: eval_cjyt(1, 4, 4, 1)):
        with pytest.raises(ParameterError):
            bad()


def test_cjyt_against_scheme_b_comparison():
    # with k = q, t = ceil(g^2/2), n = m-1 the floor term is ceil(g/2)
    for g in range(1, 9):
        z = -(-g * g // 2)
        q = z + g
        for m in (1, 2, 3):
            e = eval_cjyt(m - 1, q, z, 1)
            assert e.gain == m * -(-g // 2)
            assert F_(eval_scheme_b(g, m).F, e.F) == F_(q, -(-g // 2))


# ---------------------------------------------------------------- bound

def test_inequality_sweep():
    assert all(inequality_holds(q, z) for q in range(2, 101) for z in range(1, q))


def test_ratio_examples():
    assert subpacketization_ratio_bound(5, 3, 2)[0] == F_(10, 7)
    assert subpacketization_ratio_bound(5, 3, 10)[0] < F_(1, 1000)


def test_ratio_monotone_and_below_estimate():
    prev = None
    for m in range(2, 13):
        ratio, est = subpacketization_ratio_bound(5, 3, m)
        assert ratio == F_(3 * 10 ** m, comb(5 * m, 3 * m))
        assert ratio <= est <= F_(3 * (5 * m + 1), 2 ** m)
        if prev is not None:
            assert ratio < prev
        if m >= 8:
            assert ratio < F_(2 ** 4, 2 ** m)
        prev = ratio


# ---------------------------------------------------------------- tradeoff

def _rows(csv_text):
    return list(csv.reader(io.StringIO(csv_text)))


def test_tradeoff_7843():
    res = tradeoff_table(7843, [F_(1, 23)])
    by = {r.scheme: r for r in res.rows}
    assert by["SchemeC"].load == 22
    assert by["MN"].load == F_(7843 - 341, 342)
    assert by["MN"].F == comb(7843, 341)
    assert by["SchemeC"].F == comb(23, 1) ** 341
    assert _rows(res.to_csv())[0] == list(bench.TRADEOFF_HEADER)


def test_tradeoff_small():
    res = tradeoff_table(4, [F_(1, 2)])
    by = {r.scheme: r for r in res.rows}
    assert by["MN"].load == F_(2, 3) and by["MN"].log2F == math.log2(6)
    assert by["SchemeC"].load == 1 and by["SchemeC"].F == 4


def test_tradeoff_endpoints_and_skips():
    res = tradeoff_table(6, [0, 1, F_(2, 5), F_(1, 6), F_(3, 2)])
    kinds = [r.scheme for r in res.rows]
    assert kinds[:2] == ["uncoded", "full-cache"]
    assert res.rows[0].load == 6 and res.rows[0].F == 1
    assert "MN-floor" in kinds and "MN-ceil" in kinds
    reasons = dict(res.skipped)
    assert "divide" in reasons[F_(2, 5)]
    assert "K/q" in reasons[F_(1, 6)]
    assert "outside" in reasons[F_(3, 2)]


def test_tradeoff_csv_stable():
    ratios = [F_(z, q) for q in (11, 23, 31) for z in (1, 5, 9)]
    a = tradeoff_table(7843, ratios).to_csv()
    b = tradeoff_table(7843, list(ratios)).to_csv()
    assert a == b
    for row in _rows(a)[1:]:
        assert len(row[5].split(".")[1]) == 6


# ---------------------------------------------------------------- compare

REFERENCE = {
    # (table, label prefix): (load, F as a function of m)
    (3, "CJYT k=28"): (F_(15), lambda m: 784 ** m // 28),
    (3, "CJYT k=55"): (F_(12), lambda m: 2 * 55 ** (3 * m) // 55),
    (4, "CJYT k=4"): (F_(1, 3), lambda m: 3 * 4096 ** m // 4),
    (4, "TR k=3"): (F_(3, 8), lambda m: 8 * 729 ** m // 3),
    (4, "CJYT k=32"): (F_(7, 4), lambda m: 32 ** m // 8),
    (4, "TR k=4"): (F_(7, 24), lambda m: 6 * 16384 ** m),
}


@pytest.mark.parametrize("m", [1, 2, 3])
def test_compare_matches_reference(m):
    for table in (3, 4):
        rows = bench.compare_table(table, m)
        for (t, prefix), (load, F) in REFERENCE.items():
            if t != table:
                continue
            (row,) = [r for r in rows if r.scheme.startswith(prefix)]
            assert F_(row.load) == load and int(row.F) == F(m)
        ref = [r for r in rows if r.source == "reference"]
        assert all(r.log2F == "" for r in ref)
    schemes_b = [r for r in bench.compare_table(4, m) if r.scheme.startswith("SchemeB")]
    assert [(r.K, r.load, r.F) for r in schemes_b] == [(24 * m, "1", str(24 ** m)),
                                                       (32 * m, "1", str(32 ** m))]


def test_compare_byte_stable():
    assert bench.render_compare(bench.compare_table(3, 2)) == bench.render_compare(bench.compare_table(3, 2))
    with pytest.raises(ParameterError):
        bench.compare_table(5)


def test_scheme_eval_json():
    d = json.loads(eval_scheme_c(5, 3, 2).to_json())
    assert d["family"] == "SchemeC" and d["F"] == "300" and d["load"] == "2/3"
    assert d["params"] == {"q": 5, "z": 3, "m": 2}
