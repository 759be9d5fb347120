"""Post-processing checks on energy histories."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MonotoneReport:
    """Result of a non-increase check.

    ``worst`` is the largest relative uptick ``(v[i+1] - v[i]) / |v[i]|`` and
    ``index`` the position ``i + 1`` where it occurs.
    """

    ok: bool
    worst: float
    index: int
    n_upticks: int


def monotone_report(values, rtol=1e-9, start=0):
    """Check that ``values[start:]`` never increases by more than ``rtol`` relative."""
    v = np.asarray(values, dtype=float)[start:]
    if v.size < 2:
        return MonotoneReport(True, 0.0, start, 0)
    rel = np.diff(v) / np.maximum(np.abs(v[:-1]), 1e-300)
    i = int(np.argmax(rel))
    bad = int(np.count_nonzero(rel > rtol))
    return MonotoneReport(bad == 0, float(rel[i]), start + i + 1, bad)


def is_nonincreasing(values, rtol=1e-9, start=0):
    return monotone_report(values, rtol, start).ok


def max_relative_drift(values):
    """``max |v - v[0]| / max(|v[0]|, 1e-300)``."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return 0.0
    return float(np.max(np.abs(v - v[0])) / max(abs(v[0]), 1e-300))


def read_energies(path):
    """Read an ``energies.csv`` into a dict of numpy columns."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return {}
    return {k: np.array([float(r[k]) for r in rows]) for k in rows[0]}
