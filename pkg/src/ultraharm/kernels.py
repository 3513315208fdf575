"""Backend selection for the sparse transform kernels.

The compiled extension ``ultraharm._ckernels`` is used when it imports;
otherwise a vectorized numpy implementation takes over.  Setting the
environment variable ``ULTRAHARM_KERNEL=python`` forces the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from .dual import KIND_CODES, Irrep, sparse, values
from .padic import root_table

try:  # pragma: no cover - depends on the build
    from . import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None

_backend = "cython" if _ckernels is not None and os.environ.get("ULTRAHARM_KERNEL", "") != "python" else "python"


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _ckernels is not None else [])


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in available_backends():
        raise ValueError(f"backend {name!r} is not available; choose from {available_backends()}")
    _backend = name


def _forward_python(irrep: Irrep, X: np.ndarray, f: np.ndarray) -> np.ndarray:
    rows, ph = sparse(irrep, X)
    D = irrep.dim
    w = np.conj(values(irrep, ph)) * f[:, None]
    idx = (np.arange(D)[None, :] * D + rows).ravel()
    out = np.bincount(idx, weights=w.real.ravel(), minlength=D * D) + 1j * np.bincount(
        idx, weights=w.imag.ravel(), minlength=D * D
    )
    return out.reshape(D, D)


def _inverse_python(irrep: Irrep, X: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    rows, ph = sparse(irrep, X)
    D = irrep.dim
    gathered = sigma[np.broadcast_to(np.arange(D), rows.shape), rows]
    return (values(irrep, ph) * gathered).sum(axis=1)


def forward_irrep(irrep: Irrep, X: np.ndarray, f: np.ndarray, which: str | None = None) -> np.ndarray:
    """sum_x f(x) pi(x)^* over the rows of X (no normalization)."""
    which = which or _backend
    f = np.ascontiguousarray(f, dtype=np.complex128)
    if which == "cython":
        out = np.zeros((irrep.dim, irrep.dim), dtype=np.complex128)
        _ckernels.forward_block(
            KIND_CODES[irrep.group.kind], irrep.group.d, irrep.group.p, irrep.m, irrep.level,
            np.ascontiguousarray(irrep.numerators), np.ascontiguousarray(X, dtype=np.int64), f,
            root_table(irrep.group.p, irrep.level), out,
        )
        return out
    return _forward_python(irrep, X, f)


def inverse_irrep(irrep: Irrep, X: np.ndarray, sigma: np.ndarray, which: str | None = None) -> np.ndarray:
    """Tr[pi(x) sigma] for every row x of X."""
    which = which or _backend
    sigma = np.ascontiguousarray(sigma, dtype=np.complex128)
    if which == "cython":
        out = np.zeros(len(X), dtype=np.complex128)
        _ckernels.inverse_block(
            KIND_CODES[irrep.group.kind], irrep.group.d, irrep.group.p, irrep.m, irrep.level,
            np.ascontiguousarray(irrep.numerators), np.ascontiguousarray(X, dtype=np.int64), sigma,
            root_table(irrep.group.p, irrep.level), 1.0, out,
        )
        return out
    return _inverse_python(irrep, X, sigma)


def _eigen_one_python(irrep: Irrep, X: np.ndarray) -> np.ndarray:
    rows, ph = sparse(irrep, X)
    M, D = rows.shape
    qL = irrep.group.p ** irrep.level
    # label every column by the smallest column on its cycle
    label = np.broadcast_to(np.arange(D), (M, D)).copy()
    cur = label.copy()
    mi = np.arange(M)[:, None]
    for _ in range(max(irrep.group.p**irrep.m - 1, 0)):
        cur = rows[mi, cur]
        np.minimum(label, cur, out=label)
    key = (mi * D + label).ravel()
    sums = np.bincount(key, weights=ph.ravel().astype(np.float64), minlength=M * D).reshape(M, D)
    leaders = label == np.arange(D)[None, :]
    return np.sum(leaders & (np.mod(np.rint(sums).astype(np.int64), qL) == 0), axis=1)


def eigen_one_counts(irrep: Irrep, X: np.ndarray, which: str | None = None) -> np.ndarray:
    """Multiplicity of the eigenvalue 1 of pi(x) for each row x of X."""
    which = which or _backend
    X = np.ascontiguousarray(X, dtype=np.int64)
    if which == "cython":
        D = irrep.dim
        out = np.zeros(len(X), dtype=np.int64)
        _ckernels.eigen_one_counts(
            KIND_CODES[irrep.group.kind], irrep.group.d, irrep.group.p, irrep.m, irrep.level,
            np.ascontiguousarray(irrep.numerators), X, out,
            np.zeros(D, dtype=np.int64), np.zeros(D, dtype=np.int64), np.zeros(D, dtype=np.int64),
        )
        return out
    return _eigen_one_python(irrep, X)


def sparse_table(irrep: Irrep, X: np.ndarray, which: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(rows, integer phases) of pi(x) for every row x of X, as int64 arrays of shape (len(X), dim)."""
    which = which or _backend
    X = np.ascontiguousarray(X, dtype=np.int64)
    if which == "cython":
        rows = np.zeros((len(X), irrep.dim), dtype=np.int64)
        ph = np.zeros_like(rows)
        _ckernels.sparse_table(
            KIND_CODES[irrep.group.kind], irrep.group.d, irrep.group.p, irrep.m, irrep.level,
            np.ascontiguousarray(irrep.numerators), X, rows, ph,
        )
        return rows, ph
    rows, ph = sparse(irrep, X)
    qL = irrep.group.p ** irrep.level
    return np.ascontiguousarray(rows, dtype=np.int64), np.mod(np.asarray(ph, dtype=np.int64), qL)




class PairTables:
    """Monomial tables of several irreps on a common grid, laid out side by side.

    Entry (x, c) packs the row and the integer phase of the nonzero in
    column c of pi(x) as (row << shift) | phase, rows relative to the block.
    """

    def __init__(self, irreps, X: np.ndarray, which: str | None = None):
        self.irreps = list(irreps)
        if not self.irreps:
            raise ValueError("at least one irrep is needed")
        blocks = [sparse_table(pi, X, which) for pi in self.irreps]
        self.offsets = np.concatenate([[0], np.cumsum([pi.dim for pi in self.irreps])]).astype(np.int64)
        self.moduli = np.array([pi.group.p**pi.level for pi in self.irreps], dtype=np.int64)
        self.shift = int(2 * self.moduli.max() - 1).bit_length()
        if max(pi.dim for pi in self.irreps) >= 2 ** (31 - self.shift):
            raise ValueError("irreps are too large for packed tables")
        self.code = np.ascontiguousarray(
            np.concatenate([(b[0] << self.shift) | b[1] for b in blocks], axis=1), dtype=np.int32
        )


def homomorphism_residual(tables: PairTables, ia: np.ndarray, ib: np.ndarray, prod: np.ndarray,
                          which: str | None = None) -> float:
    """Largest entry of |pi(x) pi(y) - pi(xy)| over all tabulated irreps and the given pairs.

    Pairs are (ia[i], ib[i, k]) as row indices into the grid of the tables,
    and prod[i, k] is the row of their product.
    """
    which = which or _backend
    ia = np.ascontiguousarray(ia, dtype=np.int64)
    ib, prod = (np.ascontiguousarray(np.atleast_2d(v), dtype=np.int64) for v in (ib, prod))
    if which == "cython":
        return float(_ckernels.homomorphism_residual_packed(
            tables.code, tables.offsets, tables.moduli, tables.shift, ia, ib, prod,
        ))
    mask = (1 << tables.shift) - 1
    x = np.broadcast_to(ia[:, None], ib.shape).ravel()
    y, xy = ib.ravel(), prod.ravel()
    worst = 0.0
    for j, q in enumerate(tables.moduli):
        o, e = tables.offsets[j], tables.offsets[j + 1]
        code = tables.code[:, o:e].astype(np.int64)
        cy = code[y]
        cx = code[x[:, None], cy >> tables.shift]
        target = code[xy]
        same_row = (cx >> tables.shift) == (target >> tables.shift)
        a = np.mod((cx & mask) + (cy & mask), q)
        diff = 2.0 * np.abs(np.sin(np.pi * (a - (target & mask)) / q))
        worst = max(worst, float(np.max(np.where(same_row, diff, 1.0), initial=0.0)))
    return worst
