"""Dense complex Hermitian operator algebra for small quantum systems.

All fractional and negative matrix powers act on the support only: eigenvalues
below a relative cutoff are treated as exact zeros, so expressions like
``sigma ** (-1/2)`` mean the pseudo-inverse square root.  Everything is stored
dense; the toolkit targets subsystem dimensions of a few and total dimensions
up to a few thousand.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, InvalidParameterError

#: eigenvalues within this distance below zero are clamped to zero
EIGENVALUE_FLOOR = -1e-10
#: trace of a density operator must match 1 this tightly before renormalizing
TRACE_ATOL = 1e-10
#: relative eigenvalue cutoff defining the support of a PSD operator
SUPPORT_CUTOFF = 1e-12
#: largest total Hilbert-space dimension the toolkit will materialize
DIMENSION_CAP = 4096


def _as_square_complex(entries) -> np.ndarray:
    arr = np.array(entries, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise InvalidInputError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise InvalidInputError("matrix has non-finite entries")
    return arr


def _sym(arr: np.ndarray) -> np.ndarray:
    """Hermitian part (A + A^dagger)/2; batched over leading axes."""
    return (arr + np.conj(np.swapaxes(arr, -2, -1))) / 2.0


@dataclass(frozen=True)
class HermitianOperator:
    """Square complex matrix, symmetrized to (A + A^dagger)/2 on construction."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _sym(_as_square_complex(self.entries))
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries).real)


@dataclass(frozen=True)
class DensityOperator:
    """Positive semi-definite, unit-trace Hermitian operator.

    Eigenvalues in [EIGENVALUE_FLOOR, 0) are clamped to zero and the trace is
    renormalized, so round-off accumulated by iterative optimizers does not
    propagate.  Anything more negative, or a trace off by more than
    TRACE_ATOL, is rejected.
    """

    base: HermitianOperator

    def __post_init__(self):
        base = self.base
        if not isinstance(base, HermitianOperator):
            base = HermitianOperator(base)
        w = np.linalg.eigvalsh(base.entries)
        if w[0] < EIGENVALUE_FLOOR:
            raise InvalidInputError(
                f"matrix is not positive semi-definite (min eigenvalue {w[0]:.3e})"
            )
        tr = float(w.sum())
        if abs(tr - 1.0) > TRACE_ATOL:
            raise InvalidInputError(f"trace {tr!r} is not 1 within {TRACE_ATOL}")
        if w[0] < 0.0:
            wfull, v = np.linalg.eigh(base.entries)
            wfull = np.clip(wfull, 0.0, None)
            arr = (v * (wfull / wfull.sum())) @ v.conj().T
            base = HermitianOperator(arr)
        elif tr != 1.0:
            base = HermitianOperator(base.entries / tr)
        object.__setattr__(self, "base", base)

    @property
    def entries(self) -> np.ndarray:
        return self.base.entries

    @property
    def dim(self) -> int:
        return self.base.dim


def _entries(op) -> np.ndarray:
    """Accept HermitianOperator, DensityOperator, or a raw array."""
    if isinstance(op, DensityOperator):
        return op.base.entries
    if isinstance(op, HermitianOperator):
        return op.entries
    return _as_square_complex(op)


def eig_hermitian(op) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and matching unitary of eigenvectors."""
    w, v = np.linalg.eigh(_entries(op))
    return np.ascontiguousarray(w[::-1]), np.ascontiguousarray(v[:, ::-1])


def support_power(arr: np.ndarray, t: float, *, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """``arr ** t`` on the support of a PSD ndarray; support eigenvalues only.

    Eigenvalues below ``cutoff * max_eigenvalue`` map to 0 for any ``t``,
    which realizes the support-restricted negative powers used throughout.
    """
    w, v = np.linalg.eigh(arr)
    top = float(w[-1])
    if top <= 0.0:
        return np.zeros_like(arr)
    mask = w > top * cutoff
    vals = np.zeros_like(w)
    vals[mask] = w[mask] ** t
    return _sym((v * vals) @ v.conj().T)


def matrix_power(op, t: float) -> HermitianOperator:
    """Fractional (possibly negative) power of a PSD operator on its support."""
    arr = _entries(op)
    wmin = float(np.linalg.eigvalsh(arr)[0])
    if wmin < EIGENVALUE_FLOOR:
        raise InvalidInputError(
            f"matrix_power requires a PSD operator (min eigenvalue {wmin:.3e})"
        )
    return HermitianOperator(support_power(arr, float(t)))


def schatten_norm(op, p: float) -> float:
    """Schatten p-norm (sum of |eigenvalue|^p) ** (1/p), p >= 1."""
    if p < 1.0:
        raise InvalidParameterError(f"Schatten norm requires p >= 1, got {p}")
    w = np.abs(np.linalg.eigvalsh(_entries(op)))
    if np.isinf(p):
        return float(w.max())
    return float(np.sum(w**p) ** (1.0 / p))


def trace_norm(arr: np.ndarray) -> float:
    """Trace norm of a Hermitian ndarray: sum of absolute eigenvalues."""
    return float(np.abs(np.linalg.eigvalsh(arr)).sum())


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of the difference of two states."""
    a, b = _entries(rho), _entries(sigma)
    if a.shape != b.shape:
        raise InvalidInputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return 0.5 * trace_norm(a - b)


def tensor(ops: Sequence) -> HermitianOperator:
    """Kronecker product of the operators in list order."""
    mats = [_entries(op) for op in ops]
    if not mats:
        raise InvalidInputError("tensor of an empty list is undefined")
    return HermitianOperator(reduce(np.kron, mats))


# -- JSON wire format ---------------------------------------------------------
# Complex matrices travel as arrays of rows, each entry an [re, im] pair.


def matrix_to_json(op) -> list:
    arr = _entries(op)
    return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


def matrix_from_json(rows) -> np.ndarray:
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed matrix JSON: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(
            "matrix JSON must be a square array of rows of [re, im] pairs, "
            f"got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def random_density(rng: np.random.Generator, dim: int, *, mix: float = 0.0) -> DensityOperator:
    """Hilbert-Schmidt-style random state, optionally mixed with I/dim."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    if mix > 0.0:
        rho = (1.0 - mix) * rho + mix * np.eye(dim) / dim
    return DensityOperator(HermitianOperator(rho))


def random_pure(rng: np.random.Generator, dim: int) -> DensityOperator:
    """Haar-random pure state."""
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    return DensityOperator(HermitianOperator(np.outer(psi, psi.conj())))
