"""Uncoded placement, XOR multicast delivery and per-user decoding driven by a PDA."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .pda_core import STAR, Pda, PdaError, compute_params

__all__ = [
    "DecodeError",
    "Library",
    "CacheSnapshot",
    "TransmissionLog",
    "SimReport",
    "random_library",
    "place",
    "deliver",
    "decode",
    "run_roundtrip",
]

DEFAULT_PACKET_BYTES = 64


class DecodeError(RuntimeError):
    def __init__(self, user: int, packet: int, code: int, msg: str = ""):
        super().__init__(msg or f"user {user} cannot decode packet {packet} from message {code}")
        self.user, self.packet, self.code = user, packet, code


@dataclass(frozen=True, eq=False)
class Library:
    """N files of F packets, L bytes each: ``data[n - 1, j - 1]`` is packet W_{n,j}."""

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3 or self.data.dtype != np.uint8 or 0 in self.data.shape:
            raise ValueError("library data must be a nonempty (N, F, L) uint8 array")

    @property
    def N(self) -> int:
        return self.data.shape[0]

    @property
    def F(self) -> int:
        return self.data.shape[1]

    @property
    def L(self) -> int:
        return self.data.shape[2]


def random_library(N: int, F: int, L: int = DEFAULT_PACKET_BYTES, seed: int = 0) -> Library:
    rng = np.random.default_rng(seed)
    return Library(rng.integers(0, 256, size=(N, F, L), dtype=np.uint8))


@dataclass(frozen=True, eq=False)
class CacheSnapshot:
    """User k stores packet j of every file iff P(j, k) is a star.

    ``rows[k]`` lists the cached packet indices (0-based, ascending) and
    ``store[k]`` holds their bytes with shape (N, Z, L).
    """

    rows: np.ndarray
    store: np.ndarray

    def slot_table(self, F: int) -> np.ndarray:
        """(K, F) map from packet index to cache slot, -1 where not cached."""
        K, Z = self.rows.shape
        table = np.full((K, F), -1, dtype=np.int64)
        table[np.arange(K)[:, None], self.rows] = np.arange(Z)
        return table

    def has(self, k: int, j: int) -> bool:
        return bool(np.any(self.rows[k] == j))

    def packet(self, k: int, n: int, j: int) -> np.ndarray:
        hit = np.flatnonzero(self.rows[k] == j)
        if not hit.size:
            raise KeyError((k, j))
        return self.store[k, n, hit[0]]

    @property
    def bytes_per_user(self) -> int:
        return int(self.store[0].nbytes)


@dataclass(frozen=True, eq=False)
class TransmissionLog:
    """``messages[s - 1]`` is the XOR sent in slot s; ``participants[s - 1]`` its (j, k) cells (0-based)."""

    messages: np.ndarray
    participants: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def bytes_sent(self) -> int:
        return int(self.messages.nbytes)


def _check_demand(d, K: int, N: int) -> np.ndarray:
    d = np.asarray(d, dtype=np.int64)
    if d.shape != (K,):
        raise ValueError(f"demand vector must have {K} entries")
    if d.min() < 1 or d.max() > N:
        raise ValueError(f"demands must lie in [1:{N}]")
    return d - 1


def place(p: Pda, lib: Library) -> CacheSnapshot:
    if lib.F != p.F:
        raise PdaError(f"library has {lib.F} packets per file, array has {p.F} rows")
    stars = (p.grid == STAR).sum(axis=0)
    if np.any(stars != stars[0]):
        raise PdaError("columns have unequal star counts")
    rows = np.stack([np.flatnonzero(p.grid[:, k] == STAR) for k in range(p.K)])
    store = np.stack([lib.data[:, r, :] for r in rows])
    return CacheSnapshot(rows, store)


def _cells_by_code(p: Pda) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    j, k = np.nonzero(p.grid != STAR)
    codes = p.grid[j, k]
    order = np.lexsort((k, codes))
    return j[order], k[order], codes[order]


def deliver(p: Pda, lib: Library, d) -> TransmissionLog:
    if lib.F != p.F:
        raise PdaError(f"library has {lib.F} packets per file, array has {p.F} rows")
    d0 = _check_demand(d, p.K, lib.N)
    j, k, codes = _cells_by_code(p)
    messages = np.zeros((p.S, lib.L), dtype=np.uint8)
    np.bitwise_xor.at(messages, codes - 1, lib.data[d0[k], j])
    bounds = np.searchsorted(codes, np.arange(1, p.S + 2))
    parts = tuple(
        tuple(zip(j[a:b].tolist(), k[a:b].tolist())) for a, b in zip(bounds[:-1], bounds[1:])
    )
    return TransmissionLog(messages, parts)


def decode(p: Pda, cache: CacheSnapshot, log: TransmissionLog, d) -> np.ndarray:
    """Reconstruct every user's requested file; returns shape (K, F, L).

    Each missing packet is its slot message XOR the other participants'
    packets, read from the decoding user's own cache.
    """
    K, F = p.K, p.F
    N, L = cache.store.shape[1], log.messages.shape[1]
    d0 = _check_demand(d, K, N)
    out = np.zeros((K, F, L), dtype=np.uint8)
    for k in range(K):
        out[k, cache.rows[k]] = cache.store[k, d0[k]]
    slots = cache.slot_table(F)

    sizes = np.array([len(c) for c in log.participants])
    for g in np.unique(sizes):
        codes = np.flatnonzero(sizes == g)
        cells = np.array([log.participants[s] for s in codes], dtype=np.int64).reshape(len(codes), g, 2)
        j, k = cells[..., 0], cells[..., 1]
        acc = log.messages[codes][:, None, :].repeat(g, axis=1)  # (n, g, L)
        for shift in range(1, g):
            # partner of cell i is cell (i + shift) mod g of the same code
            j2, k2 = np.roll(j, -shift, axis=1), np.roll(k, -shift, axis=1)
            slot = slots[k, j2]
            if np.any(slot < 0):
                c, i = map(int, np.argwhere(slot < 0)[0])
                raise DecodeError(int(k[c, i]) + 1, int(j[c, i]) + 1, int(codes[c]) + 1,
                                  f"user {k[c, i] + 1} lacks packet {j2[c, i] + 1} of file "
                                  f"{d0[k2[c, i]] + 1} needed in slot {codes[c] + 1}")
            acc ^= cache.store[k, d0[k2], slot]
        out[k, j] = acc
    return out


@dataclass(frozen=True)
class SimReport:
    K: int
    F: int
    Z: int
    S: int
    load: Fraction
    ratio: Fraction
    decode_ok: bool
    bytes_sent: int
    bytes_cached_per_user: int

    def to_dict(self) -> dict:
        return {
            "K": self.K, "F": self.F, "Z": self.Z, "S": self.S,
            "load_num": self.load.numerator, "load_den": self.load.denominator,
            "ratio_num": self.ratio.numerator, "ratio_den": self.ratio.denominator,
            "decode_ok": self.decode_ok,
            "bytes_sent": self.bytes_sent,
            "bytes_cached_per_user": self.bytes_cached_per_user,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def run_roundtrip(p: Pda, N: int, L: int = DEFAULT_PACKET_BYTES, d=None, seed: int = 0) -> SimReport:
    """Place, deliver and decode once; ``d`` defaults to a seeded random demand."""
    params = compute_params(p)
    lib = random_library(N, p.F, L, seed)
    if d is None:
        d = np.random.default_rng(seed + 1).integers(1, N + 1, size=p.K)
    cache = place(p, lib)
    log = deliver(p, lib, d)
    files = decode(p, cache, log, d)
    ok = bool(np.array_equal(files, lib.data[np.asarray(d) - 1]))
    cached = cache.bytes_per_user
    return SimReport(
        K=params.K, F=params.F, Z=params.Z, S=params.S,
        load=Fraction(log.messages.shape[0], p.F),
        ratio=Fraction(cached, lib.data.nbytes),
        decode_ok=ok,
        bytes_sent=log.bytes_sent,
        bytes_cached_per_user=cached,
    )
