"""Sparse and dense matrix kernels shared by the whole pipeline.

Sparse matrices are scipy CSR in canonical form: sorted column indices,
duplicates coalesced, float64 values. Dense label matrices are C-contiguous
ndarrays, float32 in the pipeline; every kernel here preserves the dense
operand's dtype while accumulating in float64.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp


def build_csr(rows, cols, vals, shape) -> sp.csr_matrix:
    """Assemble a canonical CSR matrix, summing duplicate (row, col) entries."""
    rows = np.asarray(rows)
    cols = np.asarray(cols)
    vals = np.asarray(vals, dtype=np.float64)
    mat = sp.coo_matrix((vals, (rows, cols)), shape=shape).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


def spmm(a: sp.csr_matrix, b: np.ndarray) -> np.ndarray:
    """Sparse @ dense with float64 accumulation, result in b's dtype."""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"spmm shape mismatch: {a.shape} x {b.shape}")
    acc = a @ b.astype(np.float64, copy=False)
    return np.ascontiguousarray(acc.astype(b.dtype, copy=False))


def row_normalize_l1(a: sp.csr_matrix) -> sp.csr_matrix:
    """Scale each row to unit L1 mass; empty rows stay empty."""
    if a.nnz and a.data.min() < 0:
        raise ValueError("row_normalize_l1 requires non-negative values")
    out = a.copy()
    sums = np.asarray(out.sum(axis=1)).ravel()
    inv = np.divide(1.0, sums, out=np.zeros_like(sums), where=sums > 0)
    out.data *= np.repeat(inv, np.diff(out.indptr))
    return out


def l2_normalize_rows(b: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Scale each row to unit L2 norm; rows with norm <= eps become zeros."""
    norms = np.sqrt(np.einsum("ij,ij->i", b, b, dtype=np.float64))
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > eps)
    return b * inv.astype(b.dtype)[:, None]


def transpose(a: sp.csr_matrix) -> sp.csr_matrix:
    out = a.transpose().tocsr()
    out.sum_duplicates()
    out.sort_indices()
    return out
