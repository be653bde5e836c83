"""Placement delivery arrays: data model, verification, certificates and text I/O.

Rows, columns and codes are 1-based at every public boundary. Internally a grid
is an ``F x K`` integer array where ``STAR`` (0) marks a cached packet.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

STAR = 0

__all__ = [
    "STAR",
    "PdaError",
    "ParseError",
    "Pda",
    "PdaParams",
    "Violation",
    "CheckReport",
    "StarRowCertificate",
    "Infeasible",
    "verify_pda",
    "compute_params",
    "code_positions",
    "star_rows_for",
    "find_certificate",
    "search_certificate",
    "verify_certificate",
    "check_condition2",
    "read_pda",
    "write_pda",
]


class PdaError(ValueError):
    """Structurally invalid array (shape, code range, missing codes)."""


class ParseError(PdaError):
    def __init__(self, msg: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


def _as_grid(grid) -> np.ndarray:
    if isinstance(grid, np.ndarray):
        arr = grid
    else:
        rows = [list(r) for r in grid]
        if not rows or not rows[0]:
            raise PdaError("grid must be nonempty")
        width = len(rows[0])
        for i, r in enumerate(rows, 1):
            if len(r) != width:
                raise PdaError(f"ragged grid: row {i} has {len(r)} entries, expected {width}")
        arr = np.array(
            [[STAR if (x == "*" or x is None) else int(x) for x in r] for r in rows],
            dtype=np.int64,
        )
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise PdaError(f"grid must be a nonempty 2-d array, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise PdaError("grid entries must be integers (0 for star)")
    return arr.astype(np.int64, copy=False)


@dataclass(frozen=True, eq=False)
class Pda:
    """An ``F x K`` array of stars and codes ``1..S`` in which every code occurs.

    ``grid`` may be a numpy array (0 = star) or nested rows using ``"*"``.
    """

    grid: np.ndarray
    num_codes: int

    def __post_init__(self):
        arr = np.array(_as_grid(self.grid), dtype=np.int64, copy=True)
        s = int(self.num_codes)
        if s < 1:
            raise PdaError("S must be at least 1")
        if arr.min() < 0 or arr.max() > s:
            raise PdaError(f"code ids must lie in [1:{s}]")
        present = np.zeros(s + 1, dtype=bool)
        present[arr.ravel()] = True
        missing = np.flatnonzero(~present[1:]) + 1
        if missing.size:
            raise PdaError(f"codes never occur: {missing[:10].tolist()}")
        arr.setflags(write=False)
        object.__setattr__(self, "grid", arr)
        object.__setattr__(self, "num_codes", s)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], num_codes: int | None = None) -> "Pda":
        arr = _as_grid(rows)
        return cls(arr, int(arr.max()) if num_codes is None else num_codes)

    @property
    def F(self) -> int:
        return self.grid.shape[0]

    @property
    def K(self) -> int:
        return self.grid.shape[1]

    @property
    def S(self) -> int:
        return self.num_codes

    @property
    def star_mask(self) -> np.ndarray:
        return self.grid == STAR

    def entry(self, row: int, col: int) -> int | None:
        """Entry at 1-based (row, col); None for a star."""
        v = int(self.grid[row - 1, col - 1])
        return None if v == STAR else v

    def to_rows(self) -> list[list]:
        return [["*" if v == STAR else int(v) for v in r] for r in self.grid]

    def __eq__(self, other):
        if not isinstance(other, Pda):
            return NotImplemented
        return self.num_codes == other.num_codes and np.array_equal(self.grid, other.grid)

    def __hash__(self):
        return hash((self.grid.shape, self.num_codes, self.grid.tobytes()))

    def __repr__(self):
        return f"Pda(K={self.K}, F={self.F}, S={self.S})"


@dataclass(frozen=True)
class PdaParams:
    K: int
    F: int
    Z: int
    S: int
    memory_ratio: Fraction
    load: Fraction
    regularity: int | None
    mean_gain: Fraction

    @property
    def tuple(self) -> tuple[int, int, int, int]:
        return (self.K, self.F, self.Z, self.S)


@dataclass(frozen=True)
class Violation:
    rule: str
    row: int | None = None
    col: int | None = None
    row2: int | None = None
    col2: int | None = None
    msg: str = ""


@dataclass(frozen=True)
class CheckReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [asdict(v) for v in self.violations]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class StarRowCertificate:
    """Witness that an array can serve as a base for the Cartesian power.

    ``phi[s - 1]`` is the star row (in ``1..F/lambda``) assigned to code ``s``;
    ``b_sets[j - 1]`` lists the codes assigned to row ``j`` in ascending order.
    """

    lam: int
    phi: tuple[int, ...]
    b_sets: tuple[tuple[int, ...], ...]

    @classmethod
    def from_phi(cls, lam: int, phi: Sequence[int], num_rows: int) -> "StarRowCertificate":
        sets: list[list[int]] = [[] for _ in range(num_rows)]
        for s, j in enumerate(phi, 1):
            sets[j - 1].append(s)
        return cls(lam, tuple(int(j) for j in phi), tuple(tuple(b) for b in sets))

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "phi": list(self.phi), "b_sets": [list(b) for b in self.b_sets]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "StarRowCertificate":
        return cls(int(d["lambda"]), tuple(d["phi"]), tuple(tuple(b) for b in d["b_sets"]))


@dataclass(frozen=True)
class Infeasible:
    """No certificate exists for the requested lambda."""

    stage: str  # "divisibility" | "block_repetition" | "matching"
    reason: str

    def __bool__(self):
        return False


def _c3_violations(arr: np.ndarray) -> list[Violation]:
    flat = arr.ravel()
    cells = np.flatnonzero(flat != STAR)
    if cells.size == 0:
        return []
    order = np.argsort(flat[cells], kind="stable")
    cells = cells[order]
    codes = flat[cells]
    starts = np.flatnonzero(np.r_[True, codes[1:] != codes[:-1]])
    sizes = np.diff(np.r_[starts, cells.size])
    K = arr.shape[1]
    out: list[Violation] = []
    # one vectorised pass per distinct multiplicity
    for g in np.unique(sizes):
        if g < 2:
            continue
        sel = starts[sizes == g]
        groups = cells[sel[:, None] + np.arange(g)]
        a, b = np.triu_indices(g, 1)
        c1, c2 = groups[:, a].ravel(), groups[:, b].ravel()
        j1, k1 = np.divmod(c1, K)
        j2, k2 = np.divmod(c2, K)
        bad = (j1 == j2) | (k1 == k2) | (arr[j1, k2] != STAR) | (arr[j2, k1] != STAR)
        for idx in np.flatnonzero(bad):
            r1, q1, r2, q2 = int(j1[idx]) + 1, int(k1[idx]) + 1, int(j2[idx]) + 1, int(k2[idx]) + 1
            s = int(arr[r1 - 1, q1 - 1])
            if r1 == r2:
                msg = f"code {s} repeats in row {r1}"
            elif q1 == q2:
                msg = f"code {s} repeats in column {q1}"
            else:
                msg = f"code {s}: entries ({r1},{q2}) and ({r2},{q1}) must both be stars"
            out.append(Violation("C3", r1, q1, r2, q2, msg))
    return out


def verify_pda(grid, s_claim: int) -> CheckReport:
    """Check C1 (equal column star counts), C2 (all codes occur) and C3 on a raw grid."""
    arr = _as_grid(grid.grid if isinstance(grid, Pda) else grid)
    if s_claim < 1:
        raise PdaError("s_claim must be positive")
    if arr.min() < 0 or arr.max() > s_claim:
        raise PdaError(f"code ids must lie in [1:{s_claim}]")
    violations: list[Violation] = []

    stars = (arr == STAR).sum(axis=0)
    for k in np.flatnonzero(stars != stars[0]):
        violations.append(
            Violation("C1", col=int(k) + 1, col2=1,
                      msg=f"column {k + 1} has {stars[k]} stars, column 1 has {stars[0]}")
        )

    present = np.zeros(s_claim + 1, dtype=bool)
    present[arr.ravel()] = True
    for s in np.flatnonzero(~present[1:]) + 1:
        violations.append(Violation("C2", msg=f"code {s} never occurs"))

    violations.extend(_c3_violations(arr))
    return CheckReport(tuple(violations))


def compute_params(p: Pda) -> PdaParams:
    stars = p.star_mask.sum(axis=0)
    if np.any(stars != stars[0]):
        raise PdaError("columns have unequal star counts")
    Z = int(stars[0])
    counts = np.bincount(p.grid.ravel(), minlength=p.S + 1)[1:]
    regular = int(counts[0]) if np.all(counts == counts[0]) else None
    return PdaParams(
        K=p.K,
        F=p.F,
        Z=Z,
        S=p.S,
        memory_ratio=Fraction(Z, p.F),
        load=Fraction(p.S, p.F),
        regularity=regular,
        mean_gain=Fraction(p.K * (p.F - Z), p.S),
    )


def code_positions(p: Pda) -> list[list[tuple[int, int]]]:
    """For each code s, its 0-based (row, col) cells ordered by ascending column."""
    out: list[list[tuple[int, int]]] = [[] for _ in range(p.S + 1)]
    rows, cols = np.nonzero(p.grid.T != STAR)
    # transposed scan: rows here are columns of p
    for k, j in zip(rows.tolist(), cols.tolist()):
        out[int(p.grid[j, k])].append((j, k))
    return out[1:]


def _star_row_sets(p: Pda) -> list[np.ndarray]:
    mask = p.star_mask
    out = []
    for cells in code_positions(p):
        cols = sorted({k for _, k in cells})
        out.append(np.flatnonzero(mask[:, cols].all(axis=1)))
    return out


def star_rows_for(p: Pda, s: int) -> frozenset[int]:
    """Rows i such that every column containing code s has a star in row i."""
    if not 1 <= s <= p.S:
        raise PdaError(f"code {s} outside [1:{p.S}]")
    cols = np.flatnonzero((p.grid == s).any(axis=0))
    rows = np.flatnonzero(p.star_mask[:, cols].all(axis=1))
    return frozenset(int(i) + 1 for i in rows)


def _block_repetition_ok(p: Pda, n: int) -> bool:
    mask = p.star_mask
    first = mask[:n]
    return all(np.array_equal(mask[i:i + n], first) for i in range(n, p.F, n))


def _kuhn_b_matching(adj: list[list[int]], num_rows: int, cap: int) -> list[int] | None:
    """Assign each left node to a row, each row taking exactly ``cap`` nodes.

    Rows are split into ``cap`` slots and matched by augmenting paths; codes
    and slots are tried in ascending order. Returns row per left node, or None.
    """
    slot_adj = [[j * cap + c for j in rows for c in range(cap)] for rows in adj]
    n_slots = num_rows * cap
    owner = [-1] * n_slots

    for root in range(len(adj)):
        visited = bytearray(n_slots)
        codes, pos, via = [root], [0], []
        found = False
        while codes:
            u = codes[-1]
            nbrs = slot_adj[u]
            i = pos[-1]
            while i < len(nbrs) and visited[nbrs[i]]:
                i += 1
            if i == len(nbrs):
                codes.pop()
                pos.pop()
                if via:
                    via.pop()
                continue
            v = nbrs[i]
            pos[-1] = i + 1
            visited[v] = 1
            if owner[v] == -1:
                for code, slot in zip(codes, via + [v]):
                    owner[slot] = code
                found = True
                break
            via.append(v)
            codes.append(owner[v])
            pos.append(0)
        if not found:
            return None

    assign = [-1] * len(adj)
    for slot, code in enumerate(owner):
        if code >= 0:
            assign[code] = slot // cap
    return assign


def find_certificate(p: Pda, lam: int) -> StarRowCertificate | Infeasible:
    """Search for a star-row assignment with block parameter ``lam``."""
    params = compute_params(p)
    F, Z, S = params.F, params.Z, params.S
    if lam < 1 or F % lam or Z % lam or (lam * S) % F:
        return Infeasible("divisibility", f"lambda={lam} must divide F={F} and Z={Z}, and F | lambda*S={lam * S}")
    n = F // lam
    if not _block_repetition_ok(p, n):
        return Infeasible("block_repetition", f"star pattern does not repeat with period {n}")
    adj = [sorted({int(i) % n for i in rows}) for rows in _star_row_sets(p)]
    assign = _kuhn_b_matching(adj, n, lam * S // F)
    if assign is None:
        return Infeasible("matching", "no balanced assignment of star rows to codes")
    return StarRowCertificate.from_phi(lam, [j + 1 for j in assign], n)


def search_certificate(p: Pda) -> StarRowCertificate | Infeasible:
    """Try every divisor of gcd(F, Z) in ascending order."""
    params = compute_params(p)
    g = math.gcd(params.F, params.Z)
    last: Infeasible = Infeasible("divisibility", "no admissible lambda")
    for lam in range(1, g + 1):
        if g % lam == 0:
            res = find_certificate(p, lam)
            if res:
                return res
            last = res
    return last


def verify_certificate(p: Pda, cert: StarRowCertificate) -> CheckReport:
    F, S, lam = p.F, p.S, cert.lam
    v: list[Violation] = []
    stars = p.star_mask.sum(axis=0)
    Z = int(stars[0])
    if lam < 1 or F % lam or Z % lam or (lam * S) % F:
        return CheckReport((Violation("Cond1", msg=f"lambda={lam} incompatible with F={F}, Z={Z}, S={S}"),))
    n = F // lam
    mask = p.star_mask
    for j in range(n, F):
        diff = np.flatnonzero(mask[j] != mask[j % n])
        for k in diff:
            v.append(Violation("Cond1", row=j + 1, col=int(k) + 1, row2=j % n + 1, col2=int(k) + 1,
                               msg="star pattern not repeated across blocks"))
    if len(cert.phi) != S:
        v.append(Violation("Cond1", msg=f"phi has {len(cert.phi)} entries, expected {S}"))
        return CheckReport(tuple(v))
    for s, cells in enumerate(code_positions(p), 1):
        row = cert.phi[s - 1]
        if not 1 <= row <= n:
            v.append(Violation("Cond1", msg=f"phi({s})={row} outside [1:{n}]"))
            continue
        for j, k in cells:
            if not mask[row - 1, k]:
                v.append(Violation("Cond1", row=row, col=k + 1, row2=j + 1, col2=k + 1,
                                   msg=f"row {row} is not a star row for code {s}"))
    expected = StarRowCertificate.from_phi(lam, cert.phi, n) if all(1 <= r <= n for r in cert.phi) else None
    if len(cert.b_sets) != n:
        v.append(Violation("Cond1", msg=f"{len(cert.b_sets)} B sets, expected {n}"))
    elif expected is not None:
        size = lam * S // F
        for j, (got, want) in enumerate(zip(cert.b_sets, expected.b_sets), 1):
            if tuple(got) != want:
                v.append(Violation("Cond1", row=j, msg=f"B_{j}={list(got)} disagrees with phi ({list(want)})"))
            if len(want) != size:
                v.append(Violation("Cond1", row=j, msg=f"|B_{j}|={len(want)}, expected {size}"))
    return CheckReport(tuple(v))


def check_condition2(p: Pda) -> bool:
    per_row = p.star_mask.sum(axis=1)
    return bool(np.all(per_row == per_row[0]))


def write_pda(p: Pda) -> str:
    params_z = int(p.star_mask[:, 0].sum())
    lines = [f"{p.K} {p.F} {params_z} {p.S}"]
    for r in p.grid:
        lines.append(" ".join("*" if x == STAR else str(int(x)) for x in r))
    return "\n".join(lines) + "\n"


def _tokens(line: str) -> Iterable[tuple[int, str]]:
    i = 0
    while i < len(line):
        if line[i] in " \t":
            i += 1
            continue
        j = i
        while j < len(line) and line[j] not in " \t":
            j += 1
        yield i + 1, line[i:j]
        i = j


def read_pda(text: str) -> Pda:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty input", 1, 1)
    header = list(_tokens(lines[0]))
    if len(header) != 4:
        raise ParseError("header must be 'K F Z S'", 1, 1)
    try:
        K, F, Z, S = (int(t) for _, t in header)
    except ValueError:
        raise ParseError("header values must be decimal integers", 1, 1) from None
    if K < 1 or F < 1 or S < 1 or not 0 <= Z <= F:
        raise ParseError("header out of range", 1, 1)
    if len(lines) - 1 != F:
        raise ParseError(f"expected {F} grid rows, found {len(lines) - 1}", len(lines), 1)
    arr = np.empty((F, K), dtype=np.int64)
    for r in range(F):
        toks = list(_tokens(lines[r + 1]))
        if len(toks) != K:
            raise ParseError(f"expected {K} entries, found {len(toks)}", r + 2, 1)
        for c, (col, tok) in enumerate(toks):
            if tok == "*":
                arr[r, c] = STAR
                continue
            if not tok.isdigit():
                raise ParseError(f"bad token {tok!r}", r + 2, col)
            val = int(tok)
            if not 1 <= val <= S:
                raise ParseError(f"code {val} outside [1:{S}]", r + 2, col)
            arr[r, c] = val
    stars = (arr == STAR).sum(axis=0)
    bad = np.flatnonzero(stars != Z)
    if bad.size:
        k = int(bad[0])
        raise PdaError(f"column {k + 1} has {stars[k]} stars but header claims Z={Z}")
    return Pda(arr, S)
