"""Generators for the base arrays fed to the Cartesian frameworks."""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

from .pda_core import STAR, Pda, StarRowCertificate

__all__ = [
    "ParameterError",
    "cyc",
    "mn_pda",
    "near_square_pda",
    "ytcc_pda",
    "cwzw_pda",
    "cwzw_code_labels",
    "replicate_users",
]


class ParameterError(ValueError):
    pass


def cyc(a: int, q: int) -> int:
    """Residue of a in 1..q (q instead of 0)."""
    r = a % q
    return q if r == 0 else r


def _subset_ranks(n: int, size: int) -> dict[tuple[int, ...], int]:
    return {s: i for i, s in enumerate(itertools.combinations(range(1, n + 1), size), 1)}


def _relabel_first_appearance(labels: list[list]) -> tuple[np.ndarray, list]:
    """Map hashable labels (None = star) to dense codes by row-major first appearance."""
    ids: dict = {}
    F, K = len(labels), len(labels[0])
    arr = np.zeros((F, K), dtype=np.int64)
    for j, row in enumerate(labels):
        for k, lab in enumerate(row):
            if lab is None:
                continue
            code = ids.get(lab)
            if code is None:
                code = ids[lab] = len(ids) + 1
            arr[j, k] = code
    inverse = [None] * len(ids)
    for lab, code in ids.items():
        inverse[code - 1] = lab
    return arr, inverse


def mn_pda(q: int, z: int) -> Pda:
    """The (z+1)-regular MN array: rows are z-subsets, codes index (z+1)-subsets."""
    if not 1 <= z < q:
        raise ParameterError(f"need 1 <= z < q, got q={q}, z={z}")
    rows = list(itertools.combinations(range(1, q + 1), z))
    rank = _subset_ranks(q, z + 1)
    arr = np.zeros((len(rows), q), dtype=np.int64)
    for j, T in enumerate(rows):
        Tset = set(T)
        for k in range(1, q + 1):
            if k not in Tset:
                arr[j, k - 1] = rank[tuple(sorted(Tset | {k}))]
    return Pda(arr, comb(q, z + 1))


def near_square_pda(g: int) -> tuple[Pda, StarRowCertificate]:
    """g-regular (q, q, z, q) array with q = ceil(g^2/2) + g and its star-row certificate."""
    if g < 1:
        raise ParameterError("g must be positive")
    z = -(-g * g // 2)
    q = z + g
    half = -(-g // 2)
    arr = np.zeros((q, q), dtype=np.int64)
    for k in range(1, q + 1):
        for h in range(1, g + 1):
            j = cyc(k + h, q)
            if h <= half:
                arr[j - 1, k - 1] = cyc(j - (h - 1) * (g + 2), q)
            else:
                arr[j - 1, k - 1] = cyc(k - (g - h) * (g + 2), q)
    # the remaining z cells per column, rows k-z+1..k (cyclic), stay STAR
    phi = [cyc(s - 1, q) for s in range(1, q + 1)]
    return Pda(arr, q), StarRowCertificate.from_phi(1, phi, q)


def ytcc_pda(H: int, a: int, b: int, r: int) -> tuple[Pda, StarRowCertificate | None]:
    """Subset array: rows are b-subsets B, columns a-subsets A, a code wherever |A & B| = r.

    A certificate (phi: code -> row A - B) is returned when a = b + r.
    """
    if not (max(a, b) < H and 0 <= r < min(a, b) and a + b <= H + r):
        raise ParameterError(f"need max(a,b) < H, r < min(a,b), a+b <= H+r; got H={H}, a={a}, b={b}, r={r}")
    rows = list(itertools.combinations(range(1, H + 1), b))
    cols = list(itertools.combinations(range(1, H + 1), a))
    labels: list[list] = []
    for B in rows:
        Bs = set(B)
        line = []
        for A in cols:
            As = set(A)
            if len(As & Bs) == r:
                line.append((tuple(sorted(As ^ Bs)), tuple(sorted(As - Bs))))
            else:
                line.append(None)
        labels.append(line)
    arr, inverse = _relabel_first_appearance(labels)
    p = Pda(arr, len(inverse))
    if a != b + r:
        return p, None
    row_rank = {B: i for i, B in enumerate(rows, 1)}
    phi = [row_rank[lab[1]] for lab in inverse]
    return p, StarRowCertificate.from_phi(1, phi, len(rows))


def _cwzw_grid(m: int, q: int, t: int):
    if not (1 <= t < m and q >= 2):
        raise ParameterError(f"need 1 <= t < m and q >= 2, got m={m}, q={q}, t={t}")
    rows = [f + (cyc(sum(f), q),) for f in itertools.product(range(1, q + 1), repeat=m - 1)]
    cols = [(T, bv) for T in itertools.combinations(range(m), t)
            for bv in itertools.product(range(1, q + 1), repeat=t)]
    labels = [[None] * len(cols) for _ in rows]
    for k, (T, bv) in enumerate(cols):
        seen: dict[tuple[int, ...], int] = {}
        for j, f in enumerate(rows):
            if all(f[i] != bi for i, bi in zip(T, bv)):
                e = list(f)
                for i, bi in zip(T, bv):
                    e[i] = bi
                e = tuple(e)
                seen[e] = seen.get(e, 0) + 1
                labels[j][k] = (e, seen[e])
    arr, inverse = _relabel_first_appearance(labels)
    return rows, arr, inverse


def cwzw_pda(m: int, q: int, t: int) -> tuple[Pda, StarRowCertificate | None]:
    """Parity-vector array: rows are f in [1:q]^m with f_m = <sum f_i>_q, columns (T, b).

    A cell holds (e, n_e) when f differs from b on every coordinate of T, where e
    is f with T overwritten by b and n_e counts occurrences of e in the column
    scanning top-down. A certificate is returned when t >= 2.
    """
    rows, arr, inverse = _cwzw_grid(m, q, t)
    p = Pda(arr, len(inverse))
    if t < 2:
        return p, None
    row_rank = {f: i for i, f in enumerate(rows, 1)}
    phi = [row_rank[e[:-1] + (cyc(sum(e[:-1]), q),)] for e, _ in inverse]
    return p, StarRowCertificate.from_phi(1, phi, len(rows))


def cwzw_code_labels(m: int, q: int, t: int) -> list[tuple[tuple[int, ...], int]]:
    """The (e, n_e) label behind each code of ``cwzw_pda(m, q, t)``; entry s-1 is code s."""
    return _cwzw_grid(m, q, t)[2]


def replicate_users(p: Pda, n: int) -> Pda:
    """Side-by-side copies P | P+S | ... | P+(n-1)S."""
    if n < 1:
        raise ParameterError("n must be positive")
    blocks = []
    for i in range(n):
        blk = p.grid.copy()
        blk[blk != STAR] += i * p.S
        blocks.append(blk)
    return Pda(np.hstack(blocks), n * p.S)

