"""Fourier pseudo-spectral tools on the doubly periodic square ``[0, L)^2``.

Conventions
-----------
* Fields are real ``(n, n)`` arrays with ``u[i, j] = u(x_i, y_j)``,
  ``x_i = i L / n``; axis 0 is ``x``.
* Coefficients are ``(n, n)`` complex arrays in FFT storage order.  The
  forward transform is unnormalized and the inverse carries ``1/n^2``.
* The retained wavenumbers are ``-n/2 + 1 <= k, l <= n/2``: the Nyquist
  index is read as ``+n/2``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import GridMismatch, GridTooLarge, NotConjugateSymmetric, ValidationError

SYMMETRY_TOL = 1e-10
BRUTE_FORCE_MAX_N = 16


def mode_indices(n):
    """Integer wavenumbers in storage order, Nyquist stored as ``+n/2``."""
    k = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)
    k[n // 2] = n // 2
    return k


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform ``n x n`` collocation grid with edge length ``length``."""

    n: int
    length: float = 2.0 * math.pi
    k: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = int(self.n)
        if n != self.n or n < 2 or n % 2:
            raise ValidationError(f"n must be an even integer >= 2, got {self.n!r}")
        if not (self.length > 0.0 and math.isfinite(self.length)):
            raise ValidationError(f"length must be positive, got {self.length!r}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "length", float(self.length))
        object.__setattr__(self, "k", mode_indices(n))

    @property
    def shape(self):
        return (self.n, self.n)

    @property
    def factor(self):
        """Physical wavenumber per integer index, ``2 pi / L``."""
        return 2.0 * math.pi / self.length

    @property
    def cell_area(self):
        return (self.length / self.n) ** 2

    @property
    def area(self):
        return self.length ** 2

    def wavenumbers(self):
        """``(k, l)`` integer arrays broadcastable to the coefficient shape."""
        return self.k[:, None], self.k[None, :]

    def k_squared(self):
        """``k^2 + l^2`` as integers."""
        k, l = self.wavenumbers()
        return k * k + l * l

    def points(self):
        x = np.arange(self.n) * (self.length / self.n)
        return np.meshgrid(x, x, indexing="ij")

    # operator symbols (real per-mode multipliers)
    def laplacian(self):
        return -(self.factor ** 2) * self.k_squared().astype(float)

    def biharmonic(self):
        return self.laplacian() ** 2

    def triharmonic(self):
        return self.laplacian() ** 3

    def identity(self):
        return np.ones(self.shape)

    def negation(self):
        return -np.ones(self.shape)

    def inner(self, f, g):
        """Collocation ``L^2`` inner product ``(L/n)^2 sum f g``."""
        return self.cell_area * float(np.sum(f * g))

    def mean(self, f):
        return float(np.mean(f))


def _check_shape(grid, arr, what):
    if np.shape(arr) != grid.shape:
        raise GridMismatch(f"{what} has shape {np.shape(arr)}, grid is {grid.shape}")


def forward(u):
    """Unnormalized 2-D DFT, ``u_hat[k,l] = sum u[i,j] exp(-2 pi i (k i + l j)/n)``."""
    return np.fft.fft2(np.asarray(u, dtype=float))


def symmetry_defect(u_hat):
    """``max |u_hat[-k,-l] - conj(u_hat[k,l])|`` with indices taken mod n."""
    mirror = np.roll(np.flip(u_hat, axis=(0, 1)), 1, axis=(0, 1))
    return float(np.max(np.abs(mirror - np.conj(u_hat)))) if u_hat.size else 0.0


def inverse(u_hat, tol=SYMMETRY_TOL):
    """Inverse DFT of conjugate-symmetric coefficients, returning a real field.

    Raises NotConjugateSymmetric if the coefficients are farther than
    ``tol * max|u_hat|`` from symmetric.
    """
    u_hat = np.asarray(u_hat)
    scale = float(np.max(np.abs(u_hat))) if u_hat.size else 0.0
    if symmetry_defect(u_hat) > tol * max(scale, 1e-300):
        raise NotConjugateSymmetric("coefficients do not represent a real field")
    return np.fft.ifft2(u_hat).real


def apply_symbol(symbol, u_hat):
    """Per-mode product ``symbol[k,l] * u_hat[k,l]``."""
    symbol = np.asarray(symbol)
    if symbol.shape != np.shape(u_hat):
        raise GridMismatch(f"symbol shape {symbol.shape} != field shape {np.shape(u_hat)}")
    return symbol * u_hat


def apply_real(symbol, u):
    """Apply a diagonal operator to a real field and return a real field."""
    return np.fft.ifft2(apply_symbol(symbol, np.fft.fft2(u))).real


def padded_size(n, power=3):
    """Zero-padded grid size ``K = ceil((p+1) n / 2)``; ``2n`` for the cubic."""
    return int(math.ceil((power + 1) * n / 2))


def _pad_positions(n, big):
    return np.mod(mode_indices(n), big)


def power_dealiased(u, power=3):
    """De-aliased coefficients of ``u**power`` by zero padding.

    ``u_hat`` is placed on a ``K x K`` grid (retained modes only), the power is
    taken in physical space there, and the result is transformed back,
    rescaled by ``(K/n)^(2(p-1))`` and truncated to the retained modes.
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[0]
    big = padded_size(n, power)
    pos = _pad_positions(n, big)
    padded = np.zeros((big, big), dtype=complex)
    padded[np.ix_(pos, pos)] = np.fft.fft2(u)
    w = np.fft.fft2(np.fft.ifft2(padded) ** power)
    return w[np.ix_(pos, pos)] * (big / n) ** (2 * (power - 1))


def cubic_dealiased(u):
    return power_dealiased(u, 3)


def cubic_aliased(u):
    """Coefficients of the pointwise cube, aliasing included."""
    u = np.asarray(u, dtype=float)
    return np.fft.fft2(u ** 3)


def cube(u, dealias=True):
    """Physical-space cube, optionally de-aliased.

    The truncated index set is not symmetric at the Nyquist index, so the
    de-aliased coefficients are not exactly conjugate-symmetric there; the
    real part of the inverse transform is returned.
    """
    if not dealias:
        return np.asarray(u, dtype=float) ** 3
    return np.fft.ifft2(cubic_dealiased(u)).real


def brute_force_truncated_convolution(u_hat):
    """Alias-free triple convolution ``(1/n^4) sum u_hat[m] u_hat[p] u_hat[k-m-p]``
    over retained ``m, p, k - m - p``.  Test oracle only (``n <= 16``).
    """
    u_hat = np.asarray(u_hat, dtype=complex)
    n = u_hat.shape[0]
    if n > BRUTE_FORCE_MAX_N:
        raise GridTooLarge(f"brute-force convolution limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    ks = mode_indices(n)
    kk, ll = np.meshgrid(ks, ks, indexing="ij")
    modes = np.stack([kk.ravel(), ll.ravel()], axis=1)
    vals = u_hat.ravel()
    lo, hi = -n // 2 + 1, n // 2
    # partial sums over pairs (m, p): s = m + p
    pair = modes[:, None, :] + modes[None, :, :]
    pair_val = vals[:, None] * vals[None, :]
    out = np.zeros(n * n, dtype=complex)
    for t, target in enumerate(modes):
        r = target[None, None, :] - pair
        ok = np.all((r >= lo) & (r <= hi), axis=2)
        if not ok.any():
            continue
        rk = np.mod(r[..., 0][ok], n)
        rl = np.mod(r[..., 1][ok], n)
        out[t] = np.sum(pair_val[ok] * u_hat[rk, rl])
    return out.reshape(n, n) / float(n) ** 4


def parseval_physical(u):
    return float(np.sum(np.asarray(u) ** 2))


def parseval_spectral(u_hat):
    n2 = np.asarray(u_hat).size
    return float(np.sum(np.abs(u_hat) ** 2)) / n2


# -- snapshot files -----------------------------------------------------------
#
# Text: a header line ``N L time`` then N lines of N values, row-major
# (line i holds u[i, :]).  Binary: raw little-endian float64 in row-major
# order plus a JSON sidecar ``<file>.json`` with ``{n, length, time, order}``.

def write_snapshot(path, u, length, time, binary=False):
    u = np.asarray(u, dtype=float)
    n = u.shape[0]
    if u.shape != (n, n):
        raise GridMismatch(f"snapshot field must be square, got {u.shape}")
    path = str(path)
    if binary:
        u.astype("<f8").tofile(path)
        meta = {"n": n, "length": float(length), "time": float(time), "order": "row-major"}
        with open(path + ".json", "w") as fh:
            json.dump(meta, fh)
        return
    with open(path, "w") as fh:
        fh.write(f"{n} {float(length)!r} {float(time)!r}\n")
        np.savetxt(fh, u, fmt="%.17g")


def read_snapshot(path, binary=False):
    """Return ``(u, length, time)``."""
    path = str(path)
    if binary:
        with open(path + ".json") as fh:
            meta = json.load(fh)
        n = int(meta["n"])
        u = np.fromfile(path, dtype="<f8").reshape(n, n)
        return u, float(meta["length"]), float(meta["time"])
    with open(path) as fh:
        n, length, time = fh.readline().split()
        u = np.loadtxt(fh, ndmin=2)
    if u.shape != (int(n), int(n)):
        raise GridMismatch(f"snapshot body has shape {u.shape}, header says {n}")
    return u, float(length), float(time)
