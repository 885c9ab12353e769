"""Spectra of bipartite graphs via cyclic Jacobi on a Gram matrix.

The adjacency spectrum of a bipartite graph is plus and minus the
singular values of its biadjacency matrix B, padded with zeros.  We
diagonalize the smaller of B^T B and B B^T with a hand-rolled cyclic
Jacobi iteration: at desk scale it is simple, dependable, and accurate
to machine precision, and it hands back the orthogonal factor needed
for the reconstruction-residual check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, SolverError
from .field import BipartiteGraph

DENSE_LIMIT = 2000
ZERO_SINGULAR_TOL = 1e-7
OFF_DIAGONAL_TOL = 1e-12
MAX_SWEEPS = 100


def jacobi_eigh(A: np.ndarray, off_tol: float = OFF_DIAGONAL_TOL,
                max_sweeps: int = MAX_SWEEPS):
    """Diagonalize a symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    A : (N, N) symmetric ndarray
    off_tol : float
        Stop once the off-diagonal Frobenius norm falls below this.
    max_sweeps : int
        Hard cap on full sweeps; exceeding it raises SolverError.

    Returns
    -------
    w : (N,) eigenvalues, descending
    V : (N, N) orthogonal matrix, column i paired with w[i]
    off : final off-diagonal Frobenius norm
    """
    A = np.array(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError("matrix must be square")
    if not np.allclose(A, A.T, atol=1e-10):
        raise InputError("matrix must be symmetric")
    N = A.shape[0]
    V = np.eye(N)
    if N < 2:
        return A.diagonal().copy(), V, 0.0

    def off_norm(M):
        # never via sum(M**2) - sum(diag**2): that cancels catastrophically
        strict = M - np.diag(M.diagonal())
        return float(np.linalg.norm(strict))

    # the stop is relative to the matrix scale; rounding alone keeps the
    # off-diagonal mass near N * eps * ||A||, above any absolute target
    target = off_tol * max(1.0, float(np.linalg.norm(A)))
    off = off_norm(A)
    sweeps = 0
    while off > target:
        if sweeps >= max_sweeps:
            raise SolverError(
                f"no convergence in {max_sweeps} sweeps (off={off:.3e})",
                residual=off,
            )
        for p in range(N - 1):
            for q in range(p + 1, N):
                apq = A[p, q]
                if abs(apq) <= target / (N * N):
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
        sweeps += 1
        off = off_norm(A)
    w = A.diagonal().copy()
    order = np.argsort(-w, kind="stable")
    return w[order], V[:, order], off


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: tuple  # full adjacency multiset, descending
    lambda2: float  # second largest eigenvalue
    tolerance: float  # requested accuracy, verified achievable
    singular_values: tuple  # nonzero singular values, descending
    zero_multiplicity: int
    gram_residual: float  # max |G - V diag(w) V^T| entry

    @property
    def rank(self) -> int:
        return len(self.singular_values)


def spectrum(G: BipartiteGraph, tol: float = 1e-8) -> SpectrumReport:
    """Full adjacency spectrum of a bipartite graph.

    Works on the smaller Gram matrix of the biadjacency B; eigenvalues
    of the (m + n_right)-vertex adjacency matrix are the singular values
    of B, their negatives, and zeros for the nullity.  Singular values
    below ``ZERO_SINGULAR_TOL`` are treated as zero; an adaptive guard
    keeps rounding noise in the Gram matrix (amplified by the square
    root) from promoting true zeros above that threshold.
    """
    total = G.m + G.n_right
    if total > DENSE_LIMIT:
        raise InputError(f"{total} vertices exceeds the dense budget {DENSE_LIMIT}")
    if tol <= 0:
        raise InputError("tolerance must be positive")
    if G.m == 0 or G.n_right == 0:
        return SpectrumReport(
            tuple([0.0] * total), 0.0 if total > 1 else 0.0, tol, (), total, 0.0
        )
    B = G.biadjacency()
    gram = B.T @ B if G.n_right <= G.m else B @ B.T
    w, V, off = jacobi_eigh(gram)
    residual = float(np.max(np.abs(gram - (V * w) @ V.T)))
    if residual > max(tol, 1e-8):
        raise SolverError("Gram reconstruction residual too large", residual=residual)
    # rounding floor of the Gram eigenvalues; sqrt would blow it up to
    # ~1e-6, past the zero threshold, so classify zeros on the Gram side
    N = gram.shape[0]
    gram_floor = max(off, 100 * N * np.finfo(np.float64).eps * np.linalg.norm(gram))
    sing = []
    for value in w:
        if value <= max(gram_floor, ZERO_SINGULAR_TOL**2):
            continue
        s = float(np.sqrt(value))
        if s >= ZERO_SINGULAR_TOL:
            sing.append(s)
    sing.sort(reverse=True)
    zero_mult = total - 2 * len(sing)
    eigs = sing + [0.0] * zero_mult + [-s for s in reversed(sing)]
    lam2 = eigs[1] if len(eigs) > 1 else 0.0
    return SpectrumReport(
        tuple(eigs), float(lam2), tol, tuple(sing), zero_mult, residual
    )


def polynomial_graph_reference_spectrum(q: int, l: int) -> list:
    """Known spectrum of build_polynomial_graph(q, l), descending.

    One eigenvalue pair at +-q**(l/2) (the biregularity extreme), pairs
    at +-q**((l-1)/2) with multiplicity q**2 - q each, and zeros filling
    the remaining q**l + q**2 - 2(q**2 - q) - 2 slots.  Valid for l >= 2;
    at l = 1 the rows have pairwise disjoint supports and the middle
    eigenvalue pair is absent.
    """
    if l < 2:
        raise InputError("reference spectrum needs l >= 2")
    top = float(q) ** (l / 2.0)
    mid = float(q) ** ((l - 1) / 2.0)
    mid_mult = q * q - q
    zeros = q**l + q * q - 2 * mid_mult - 2
    if zeros < 0:
        raise InputError(f"(q={q}, l={l}) has no rank-deficient middle block")
    out = [top] + [mid] * mid_mult + [0.0] * zeros
    out += [-mid] * mid_mult + [-top]
    return out
