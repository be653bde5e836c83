"""Cartesian-power constructions.

``theorem1_scheme`` takes the m-fold product of a base array that carries a
star-row certificate; ``theorem2_scheme`` first lowers a g-regular array with
equal row star counts to a (g-1)-regular array that carries one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constructions import ParameterError
from .pda_core import (
    STAR,
    Pda,
    PdaError,
    StarRowCertificate,
    check_condition2,
    code_positions,
    compute_params,
    verify_certificate,
)

__all__ = [
    "VectorPda",
    "row_tuples",
    "cartesian_power",
    "flatten",
    "downgrade_regular",
    "rotation",
    "theorem1_scheme",
    "theorem2_scheme",
]


def row_tuples(F1: int, lam: int, m: int) -> np.ndarray:
    """Row labels (1-based) of the m-fold product, block by block, first coordinate fastest."""
    n = F1 // lam
    idx = np.arange(n ** m)
    digits = np.stack([(idx // n ** h) % n for h in range(m)], axis=1)
    blocks = [digits + i * n + 1 for i in range(lam)]
    return np.concatenate(blocks, axis=0)


@dataclass(frozen=True, eq=False)
class VectorPda:
    """Intermediate array whose codes are m-vectors of base codes.

    ``cells`` has shape (rows, m*K1, m); a star is the all-zero vector.
    Columns are ordered (delta, b) with delta major.
    """

    base: Pda
    cert: StarRowCertificate
    m: int
    rows: np.ndarray
    cells: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape[0], self.cells.shape[1]

    def entry(self, f: tuple[int, ...], delta: int, b: int) -> tuple[int, ...] | None:
        """Entry at row tuple f and column (delta, b), all 1-based."""
        n = self.base.F // self.cert.lam
        block = (f[0] - 1) // n
        r = block * n ** self.m + sum(((fh - 1) % n) * n ** h for h, fh in enumerate(f))
        if tuple(self.rows[r]) != tuple(f):
            raise KeyError(f"{f} is not a row of this array")
        v = self.cells[r, (delta - 1) * self.base.K + b - 1]
        return None if v[0] == STAR else tuple(int(x) for x in v)

    def distinct_vectors(self) -> int:
        flat = self.cells.reshape(-1, self.m)
        flat = flat[flat[:, 0] != STAR]
        return len(np.unique(flat, axis=0))

    def to_text(self) -> str:
        lines = []
        for r in range(self.cells.shape[0]):
            toks = ["*" if v[0] == STAR else "(" + ",".join(str(int(x)) for x in v) + ")"
                    for v in self.cells[r]]
            lines.append(" ".join(toks))
        return "\n".join(lines) + "\n"


def _cert_tables(cert: StarRowCertificate, S1: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """phi (1-based row per code), mu (1-based rank in its set), and B as an n x |B| matrix."""
    phi = np.zeros(S1 + 1, dtype=np.int64)
    mu = np.zeros(S1 + 1, dtype=np.int64)
    for j, bset in enumerate(cert.b_sets, 1):
        for i, s in enumerate(bset, 1):
            phi[s] = j
            mu[s] = i
    bmat = np.array([list(b) for b in cert.b_sets], dtype=np.int64)
    return phi, mu, bmat


def cartesian_power(p1: Pda, cert: StarRowCertificate, m: int) -> VectorPda:
    if m < 1:
        raise ParameterError("m must be positive")
    report = verify_certificate(p1, cert)
    if not report.ok:
        raise PdaError(f"invalid certificate: {report.violations[0].msg}")
    lam, F1, K1 = cert.lam, p1.F, p1.K
    n = F1 // lam
    _, mu, bmat = _cert_tables(cert, p1.S)
    rows = row_tuples(F1, lam, m)
    R = rows.shape[0]
    cells = np.zeros((R, m * K1, m), dtype=np.int64)
    blocks = (rows - 1) % n  # 0-based B-set index per row and coordinate
    for delta in range(m):
        base = p1.grid[rows[:, delta] - 1]  # (R, K1)
        ranks = np.maximum(mu[base] - 1, 0)
        cols = slice(delta * K1, (delta + 1) * K1)
        for h in range(m):
            if h == delta:
                cells[:, cols, h] = base
            else:
                cells[:, cols, h] = np.where(base != STAR, bmat[blocks[:, h][:, None], ranks], STAR)
    return VectorPda(p1, cert, m, rows, cells)


def flatten(v: VectorPda) -> Pda:
    """Relabel vectors e to integers: e_1 + S1 * sum_{h>=2} (l_h - 1) n^(h-2), l_h = phi(e_h)."""
    S1, m = v.base.S, v.m
    n = v.base.F // v.cert.lam
    phi, _, _ = _cert_tables(v.cert, S1)
    cells = v.cells
    out = cells[..., 0].copy()
    nz = out != STAR
    weight = S1
    for h in range(1, m):
        out[nz] += (phi[cells[..., h][nz]] - 1) * weight
        weight *= n
    return Pda(out, S1 * n ** (m - 1))


def rotation(i: int, g: int) -> tuple[int, ...]:
    """Left rotation of (1, ..., g) by i places."""
    a = tuple(range(1, g + 1))
    i %= g
    return a[i:] + a[:i]


def downgrade_regular(p: Pda) -> tuple[Pda, StarRowCertificate]:
    """Stack g-1 relabelled copies of a g-regular array into a (g-1)-regular one.

    In copy i (1-based) the eta-th occurrence (by column) of code s becomes
    g(s-1) + v with v the eta-th entry of (1..g) rotated left by i-1.
    """
    params = compute_params(p)
    g = params.regularity
    if g is None:
        raise ParameterError("array is not regular")
    if g < 2:
        raise ParameterError(f"regularity g={g} must be at least 2")
    if not check_condition2(p):
        raise ParameterError("rows have unequal star counts")
    F1 = p.F
    positions = code_positions(p)
    eta = np.zeros_like(p.grid)
    for cells in positions:
        for idx, (j, k) in enumerate(cells, 1):
            eta[j, k] = idx
    nz = p.grid != STAR
    copies = []
    for i in range(1, g):
        rot = np.array((0,) + rotation(i - 1, g), dtype=np.int64)
        blk = np.where(nz, g * (p.grid - 1) + rot[eta], STAR)
        copies.append(blk)
    out = Pda(np.vstack(copies), g * p.S)

    phi = []
    for sp in range(1, g * p.S + 1):
        v = (sp - 1) % g + 1
        s = (sp - v) // g + 1
        nxt = v % g + 1
        phi.append(positions[s - 1][nxt - 1][0] + 1)
    return out, StarRowCertificate.from_phi(g - 1, phi, F1)


def theorem1_scheme(p1: Pda, cert: StarRowCertificate, m: int) -> Pda:
    return flatten(cartesian_power(p1, cert, m))


def theorem2_scheme(p: Pda, m: int) -> Pda:
    if m < 2:
        raise ParameterError("m must be at least 2")
    p1, cert = downgrade_regular(p)
    return theorem1_scheme(p1, cert, m)
