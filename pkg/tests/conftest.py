import itertools
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from pdakit.pda_core import STAR, Pda  # noqa: E402
from reference_data import SQUARE4, MN53  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def square4() -> Pda:
    return Pda.from_rows(SQUARE4)


@pytest.fixture
def mn53() -> Pda:
    return Pda.from_rows(MN53)


@st.composite
def pdas(draw, max_f: int = 6, max_k: int = 4):
    """Random valid PDAs: a star mask with equal column counts, then cells filled
    one by one, each either reusing a code whose placement keeps C3 or opening a new one."""
    F = draw(st.integers(1, max_f))
    K = draw(st.integers(1, max_k))
    Z = draw(st.integers(0, F - 1))
    grid = np.zeros((F, K), dtype=np.int64)
    mask = np.zeros((F, K), dtype=bool)
    for k in range(K):
        rows = draw(st.lists(st.integers(0, F - 1), min_size=Z, max_size=Z, unique=True))
        mask[rows, k] = True
    cells: dict[int, list[tuple[int, int]]] = {}
    for j, k in itertools.product(range(F), range(K)):
        if mask[j, k]:
            continue
        ok = [s for s, occ in cells.items()
              if all(j != j2 and k != k2 and mask[j, k2] and mask[j2, k] for j2, k2 in occ)]
        choice = draw(st.sampled_from(ok + [0]))
        if choice == 0:
            choice = len(cells) + 1
            cells[choice] = []
        cells[choice].append((j, k))
        grid[j, k] = choice
    return Pda(grid, len(cells))


def naive_is_pda(grid: np.ndarray, S: int) -> bool:
    """Definition-level check over all cell pairs."""
    F, K = grid.shape
    stars = [(grid[:, k] == STAR).sum() for k in range(K)]
    if len(set(stars)) != 1:
        return False
    if set(range(1, S + 1)) - set(grid.ravel().tolist()):
        return False
    cells = [(j, k) for j in range(F) for k in range(K) if grid[j, k] != STAR]
    for (j1, k1), (j2, k2) in itertools.combinations(cells, 2):
        if grid[j1, k1] != grid[j2, k2]:
            continue
        if j1 == j2 or k1 == k2:
            return False
        if grid[j1, k2] != STAR or grid[j2, k1] != STAR:
            return False
    return True
