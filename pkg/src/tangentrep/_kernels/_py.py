"""Pure-numpy kernels; semantics identical to the compiled versions in _core."""

from __future__ import annotations

import numpy as np

# keep the gather matrices used by reduceat below ~32M doubles
_GATHER_BUDGET = 32_000_000


def maximin_block(gvals: np.ndarray, members: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Per row of gvals (B, N): max over index families of the family minimum.

    Families are CSR-encoded: family f covers members[offsets[f]:offsets[f+1]]
    and must be nonempty.
    """
    B = gvals.shape[0]
    total = members.shape[0]
    out = np.empty(B, dtype=float)
    rows_per_chunk = max(1, _GATHER_BUDGET // max(total, 1))
    starts = offsets[:-1]
    for lo in range(0, B, rows_per_chunk):
        hi = min(B, lo + rows_per_chunk)
        gathered = gvals[lo:hi, members]  # (b, T)
        mins = np.minimum.reduceat(gathered, starts, axis=1)
        out[lo:hi] = mins.max(axis=1)
    return out


def clause_any_all_block(slack: np.ndarray, members: np.ndarray,
                         offsets: np.ndarray, tol: float) -> np.ndarray:
    """Per row of slack (B, H): whether any CSR clause has all slacks <= tol."""
    B = slack.shape[0]
    total = members.shape[0]
    out = np.empty(B, dtype=bool)
    rows_per_chunk = max(1, _GATHER_BUDGET // max(total, 1))
    starts = offsets[:-1]
    sat = slack <= tol
    for lo in range(0, B, rows_per_chunk):
        hi = min(B, lo + rows_per_chunk)
        gathered = sat[lo:hi, members]
        alls = np.logical_and.reduceat(gathered, starts, axis=1)
        out[lo:hi] = alls.any(axis=1)
    return out
