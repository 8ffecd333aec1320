"""Dominance relation and solution archives (weak fronts and filtered fronts)."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .criticality import CriticalityCertificate
from .errors import DimensionMismatch

SNAP_TOL = 1e-10


class Phase(str, enum.Enum):
    BEFORE_TUNNEL = "BeforeTunnel"
    AFTER_TUNNEL = "AfterTunnel"


@dataclass(frozen=True, eq=False)
class ArchiveEntry:
    x: np.ndarray
    fvals: np.ndarray
    phase: Phase
    run_id: int
    certificate: Optional[CriticalityCertificate] = None


@dataclass
class ParetoArchive:
    entries: list[ArchiveEntry] = field(default_factory=list)

    def add(self, entry: ArchiveEntry) -> None:
        self.entries.append(entry)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def objective_matrix(self) -> np.ndarray:
        if not self.entries:
            return np.zeros((0, 0))
        return np.vstack([e.fvals for e in self.entries])


def dominates(a, b) -> bool:
    """``a`` dominates ``b``: no worse in every component and not equal."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot compare vectors of shape {a.shape} and {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def _dedup(entries: list[ArchiveEntry], tol: float) -> list[ArchiveEntry]:
    kept: list[ArchiveEntry] = []
    kept_f: list[np.ndarray] = []
    for e in entries:
        if kept_f and np.any(np.all(np.abs(np.vstack(kept_f) - e.fvals) <= tol, axis=1)):
            continue
        kept.append(e)
        kept_f.append(e.fvals)
    return kept


def nondominated_mask(F: np.ndarray) -> np.ndarray:
    """Boolean mask of rows of ``F`` not dominated by any other row."""
    F = np.asarray(F, dtype=float)
    if F.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)   # le[j, i]: F[j] <= F[i]
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    return ~np.any(le & lt, axis=0)


def filter_nondominated(archive: ParetoArchive | Iterable[ArchiveEntry],
                        snap: float = SNAP_TOL) -> ParetoArchive:
    """Entries of ``archive`` not dominated by any other entry.

    Objective vectors equal within ``snap`` in every component are first
    collapsed onto the entry with the smallest ``run_id``.
    """
    entries = list(archive.entries if isinstance(archive, ParetoArchive) else archive)
    entries = sorted(entries, key=lambda e: e.run_id)
    unique = _dedup(entries, snap)
    if not unique:
        return ParetoArchive()
    mask = nondominated_mask(np.vstack([e.fvals for e in unique]))
    return ParetoArchive([e for e, keep in zip(unique, mask) if keep])


def front_size(archive: ParetoArchive) -> int:
    return len(filter_nondominated(archive))
