"""Closed-form scheme evaluators, comparison tables and tradeoff data.

Every stored quantity is an exact integer or Fraction; ``log2F`` is the only
floating-point value and is derived on demand from the exact subpacketization.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .constructions import ParameterError

__all__ = [
    "SchemeEval",
    "eval_mn",
    "eval_grouping",
    "eval_scheme_a",
    "eval_scheme_b",
    "eval_scheme_c",
    "eval_partition",
    "eval_szg",
    "eval_cjyt",
    "eval_tr",
    "subpacketization_ratio_bound",
    "inequality_holds",
    "TradeoffRow",
    "TradeoffResult",
    "tradeoff_table",
    "CompareRow",
    "compare_table",
    "render_compare",
    "TRADEOFF_HEADER",
]


def _frac_str(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def log2_exact(n: int) -> float:
    if n < 1:
        raise ValueError("log2 of a non-positive integer")
    return math.log2(n)  # exact int input, no float overflow


@dataclass(frozen=True)
class SchemeEval:
    family: str
    params: tuple[tuple[str, int], ...]
    K: int
    memory_ratio: Fraction
    gain: Fraction
    load: Fraction
    F: int

    @property
    def log2F(self) -> float:
        return log2_exact(self.F)

    @property
    def tuple(self) -> tuple:
        return (self.K, self.memory_ratio, self.gain, self.load, self.F)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "params": dict(self.params),
            "K": self.K,
            "memory_ratio": _frac_str(self.memory_ratio),
            "gain": _frac_str(self.gain),
            "load": _frac_str(self.load),
            "F": str(self.F),
            "log2F": round(self.log2F, 6),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _mk(family: str, params: dict, K, ratio, gain, load, F) -> SchemeEval:
    return SchemeEval(family, tuple(params.items()), int(K), Fraction(ratio),
                      Fraction(gain), Fraction(load), int(F))


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise ParameterError(msg)


def eval_mn(K: int, t: int) -> SchemeEval:
    _need(1 <= t <= K - 1, f"need 1 <= t <= K-1, got K={K}, t={t}")
    return _mk("MN", {"K": K, "t": t}, K, Fraction(t, K), t + 1, Fraction(K - t, t + 1), comb(K, t))


def eval_grouping(k: int, t: int, n: int) -> SchemeEval:
    """n disjoint groups of k users, each served by the MN scheme with parameter t."""
    _need(1 <= t < k and n >= 1, f"need 1 <= t < k and n >= 1, got k={k}, t={t}, n={n}")
    return _mk("GroupedMN", {"k": k, "t": t, "n": n}, n * k, Fraction(t, k), t + 1,
               Fraction(n * (k - t), t + 1), comb(k, t))


def eval_scheme_a(H: int, b: int, r: int, m: int) -> SchemeEval:
    _need(0 <= r < b and 2 * b <= H and m >= 1, f"need r < b <= H/2 and m >= 1, got H={H}, b={b}, r={r}, m={m}")
    cb = comb(H, b)
    ratio = 1 - Fraction(comb(b + r, r) * comb(H - b - r, b - r), cb)
    return _mk("SchemeA", {"H": H, "b": b, "r": r, "m": m}, m * comb(H, b + r), ratio,
               m * comb(H - 2 * b + r, r), comb(H - b, b - r), cb ** m)


def eval_scheme_b(g: int, m: int) -> SchemeEval:
    _need(g >= 1 and m >= 1, f"need g >= 1 and m >= 1, got g={g}, m={m}")
    z = -(-g * g // 2)
    q = z + g
    return _mk("SchemeB", {"g": g, "m": m}, m * q, Fraction(z, q), m * g, 1, q ** m)


def eval_scheme_c(q: int, z: int, m: int) -> SchemeEval:
    # m = 1 is the lowered base array itself; the product needs m >= 2
    _need(1 <= z < q and m >= 1, f"need 1 <= z < q and m >= 1, got q={q}, z={z}, m={m}")
    return _mk("SchemeC", {"q": q, "z": z, "m": m}, m * q, Fraction(z, q), m * z,
               Fraction(q - z, z), z * comb(q, z) ** m)


# Closed forms for schemes without a constructor here.

def eval_partition(n: int, k: int, variant: int) -> SchemeEval:
    _need(n >= 1 and k >= 2, "need n >= 1 and k >= 2")
    p = {"n": n, "k": k}
    if variant == 1:
        return _mk("TableRow:partition-1", p, (n + 1) * k, Fraction(1, k), n + 1, k - 1, k ** n)
    _need(variant == 2, "variant must be 1 or 2")
    return _mk("TableRow:partition-2", p, (n + 1) * k, Fraction(k - 1, k), (n + 1) * (k - 1),
               Fraction(1, k - 1), (k - 1) * k ** n)


def eval_szg(n: int, k: int, b: int, variant: int) -> SchemeEval:
    _need(1 <= b <= n and k >= 2, "need 1 <= b <= n and k >= 2")
    p = {"n": n, "k": k, "b": b}
    K = comb(n, b) * k ** b
    if variant == 1:
        return _mk("TableRow:szg-1", p, K, 1 - Fraction(k - 1, k) ** b, comb(n, b),
                   (k - 1) ** b, k ** n)
    _need(variant == 2, "variant must be 1 or 2")
    return _mk("TableRow:szg-2", p, K, 1 - Fraction(1, k ** b), (k - 1) ** b * comb(n, b),
               Fraction(1, (k - 1) ** b), (k - 1) ** b * k ** n)


def eval_cjyt(n: int, k: int, t: int, variant: int, b: int = 1) -> SchemeEval:
    _need(1 <= t < k and n >= 0, "need 1 <= t < k and n >= 0")
    w = (k - 1) // (k - t)
    if variant == 1:
        return _mk("TableRow:cjyt-1", {"n": n, "k": k, "t": t}, (n + 1) * k, Fraction(t, k),
                   (n + 1) * w, Fraction(k - t, w), w * k ** n)
    _need(variant == 2 and 1 <= b <= n, "variant must be 1 or 2, with 1 <= b <= n")
    return _mk("TableRow:cjyt-2", {"n": n, "k": k, "t": t, "b": b}, comb(n, b) * k ** b,
               1 - Fraction(k - t, k) ** b, w ** b * comb(n, b), Fraction(k - t, w) ** b,
               w ** b * k ** n)


def eval_tr(n: int, l: int, x: int, k: int, variant: int) -> SchemeEval:
    _need(1 <= n < l and x >= 1 and k >= 2 and (l * x) % (n + 1) == 0,
          "need n < l, x >= 1, k >= 2 and (n+1) | lx")
    p = {"n": n, "l": l, "x": x, "k": k}
    if variant == 1:
        return _mk("TableRow:tr-1", p, l * k, Fraction(1, k), n + 1,
                   Fraction(l * (k - 1), n + 1), k ** n * x)
    _need(variant == 2, "variant must be 1 or 2")
    return _mk("TableRow:tr-2", p, l * k, 1 - Fraction(n + 1, l * k), l * (k - 1),
               Fraction(n + 1, l * (k - 1)), (k - 1) * k ** n * l * x // (n + 1))


def inequality_holds(q: int, z: int) -> bool:
    """Exact check of 2 C(q,z) z^z (q-z)^(q-z) <= q^q."""
    return 2 * comb(q, z) * z ** z * (q - z) ** (q - z) <= q ** q


def subpacketization_ratio_bound(q: int, z: int, m: int) -> tuple[Fraction, Fraction]:
    """Exact F_C / F_MN at K = mq users and memory ratio z/q, plus an upper estimate.

    The estimate uses C(n, k) >= n^n / ((n+1) k^k (n-k)^(n-k)) on C(mq, mz):
    ratio <= z (mq+1) (C(q,z) z^z (q-z)^(q-z) / q^q)^m, which is at most
    z (mq+1) 2^-m whenever ``inequality_holds(q, z)``.
    """
    _need(1 <= z < q and m >= 1, f"need 1 <= z < q and m >= 1, got q={q}, z={z}, m={m}")
    ratio = Fraction(z * comb(q, z) ** m, comb(m * q, m * z))
    bound = Fraction(z * comb(q, z) ** m * (z ** z * (q - z) ** (q - z)) ** m * (m * q + 1), q ** (m * q))
    return ratio, bound


# ---------------------------------------------------------------- tradeoff

TRADEOFF_HEADER = ("scheme", "ratio_num", "ratio_den", "load_num", "load_den", "log2F")


@dataclass(frozen=True)
class TradeoffRow:
    scheme: str
    ratio: Fraction
    load: Fraction
    F: int

    @property
    def log2F(self) -> float:
        return log2_exact(self.F)

    def cells(self) -> tuple[str, ...]:
        return (self.scheme, str(self.ratio.numerator), str(self.ratio.denominator),
                str(self.load.numerator), str(self.load.denominator), f"{self.log2F:.6f}")


@dataclass(frozen=True)
class TradeoffResult:
    K: int
    rows: tuple[TradeoffRow, ...]
    skipped: tuple[tuple[Fraction, str], ...] = field(default=())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRADEOFF_HEADER)
        for r in self.rows:
            w.writerow(r.cells())
        return buf.getvalue()


def tradeoff_table(K: int, ratios) -> TradeoffResult:
    """MN and Scheme C points at each memory ratio for K users.

    MN rows at a ratio with non-integer t = K * ratio are replaced by the two
    neighbouring integer-t points, tagged ``MN-floor`` and ``MN-ceil``; no
    memory sharing between them is computed. Scheme C needs ratio = z/q in
    lowest terms with q | K and K/q >= 2; otherwise it is skipped with a reason.
    """
    if K < 1:
        raise ParameterError("K must be positive")
    rows: list[TradeoffRow] = []
    skipped: list[tuple[Fraction, str]] = []
    for raw in ratios:
        x = Fraction(raw)
        if not 0 <= x <= 1:
            skipped.append((x, "ratio outside [0, 1]"))
            continue
        if x == 0:
            rows.append(TradeoffRow("uncoded", x, Fraction(K), 1))
            continue
        if x == 1:
            rows.append(TradeoffRow("full-cache", x, Fraction(0), 1))
            continue
        t = x * K
        if t.denominator == 1:
            e = eval_mn(K, int(t))
            rows.append(TradeoffRow("MN", x, e.load, e.F))
        else:
            lo, hi = math.floor(t), math.ceil(t)
            for tag, tt in (("MN-floor", lo), ("MN-ceil", hi)):
                if 1 <= tt <= K - 1:
                    e = eval_mn(K, tt)
                    rows.append(TradeoffRow(tag, e.memory_ratio, e.load, e.F))
        q, z = x.denominator, x.numerator
        if K % q:
            skipped.append((x, f"Scheme C needs q={q} to divide K={K}"))
        elif K // q < 2:
            skipped.append((x, f"Scheme C needs K/q >= 2, got {K // q}"))
        else:
            e = eval_scheme_c(q, z, K // q)
            rows.append(TradeoffRow("SchemeC", x, e.load, e.F))
    return TradeoffResult(K, tuple(rows), tuple(skipped))


# ---------------------------------------------------------------- compare

@dataclass(frozen=True)
class CompareRow:
    K: int
    ratio: Fraction
    scheme: str
    load: str
    F: str
    log2F: str
    source: str  # "exact" (evaluated here) or "reference" (fixed constant)


def _exact_row(e: SchemeEval, label: str, expect_K: int, expect_ratio: Fraction) -> CompareRow:
    if e.K != expect_K or e.memory_ratio != expect_ratio:
        raise AssertionError(f"{label}: evaluated (K, ratio) = ({e.K}, {e.memory_ratio}), "
                             f"expected ({expect_K}, {expect_ratio})")
    return CompareRow(e.K, e.memory_ratio, label, _frac_str(e.load), str(e.F),
                      f"{e.log2F:.6f}", "exact")


def _ref_row(K: int, ratio: Fraction, label: str, load: str, F: str) -> CompareRow:
    return CompareRow(K, ratio, label, load, F, "", "reference")


def compare_table(table: int, m: int = 1) -> list[CompareRow]:
    """Rows of the Scheme A (table 3) or Scheme B (table 4) comparison at a given m.

    Rows backed by a closed form are evaluated exactly. Rows that rely on
    memory sharing with unstated weights are emitted as fixed reference
    constants, tagged ``reference``.
    """
    _need(m >= 1, "m must be positive")
    rows: list[CompareRow] = []
    if table == 3:
        K, x = 56 * m, Fraction(13, 28)
        rows.append(_exact_row(eval_scheme_a(8, 3, 2, m), "SchemeA H=8 b=3 r=2", K, x))
        rows.append(_ref_row(K, x, "Grouping+sharing n=8 k=7m t=3m|4m", "~9.5", "O(119^m/sqrt(m))"))
        rows.append(_exact_row(eval_cjyt(2 * m - 1, 28, 13, 1), "CJYT k=28 t=13 n=2m-1", K, x))
        rows.append(_ref_row(K, x, "TR+sharing k=4|2 l=14m|28m", "1.1429", "O(16384^(2m))"))
        K, x = 165 * m, Fraction(31, 55)
        rows.append(_exact_row(eval_scheme_a(11, 2, 1, m), "SchemeA H=11 b=2 r=1", K, x))
        rows.append(_ref_row(K, x, "Grouping+sharing n=15 k=11m t=6m|7m", "~11.7143", "O(1957^m/sqrt(m))"))
        rows.append(_exact_row(eval_cjyt(3 * m - 1, 55, 31, 1), "CJYT k=55 t=31 n=3m-1", K, x))
        rows.append(_ref_row(K, x, "TR+sharing k=3 l=55m", "0.976", "O(177147^(5m))"))
    elif table == 4:
        K, x = 24 * m, Fraction(3, 4)
        rows.append(_exact_row(eval_scheme_b(6, m), "SchemeB g=6", K, x))
        rows.append(_exact_row(eval_grouping(8 * m, 6 * m, 3), "Grouping n=3 k=8m t=6m", K, x))
        rows.append(_exact_row(eval_cjyt(6 * m - 1, 4, 3, 1), "CJYT k=4 t=3 n=6m-1", K, x))
        rows.append(_exact_row(eval_tr(6 * m - 1, 8 * m, 3, 3, 2), "TR k=3 l=8m n=6m-1 x=3", K, x))
        K, x = 32 * m, Fraction(25, 32)
        rows.append(_exact_row(eval_scheme_b(7, m), "SchemeB g=7", K, x))
        rows.append(_ref_row(K, x, "Grouping+sharing n=4 k=8m t=6m|7m", "~1", "O(90^m/sqrt(m))"))
        rows.append(_exact_row(eval_cjyt(m - 1, 32, 25, 1), "CJYT k=32 t=25 n=m-1", K, x))
        rows.append(_exact_row(eval_tr(7 * m - 1, 8 * m, 7, 4, 2), "TR k=4 l=8m n=7m-1 x=7", K, x))
    else:
        raise ParameterError("table must be 3 or 4")
    return rows


COMPARE_HEADER = ("K", "ratio", "scheme", "load", "F", "log2F", "source")


def render_compare(rows: list[CompareRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COMPARE_HEADER)
    for r in rows:
        w.writerow((r.K, _frac_str(r.ratio), r.scheme, r.load, r.F, r.log2F, r.source))
    return buf.getvalue()
