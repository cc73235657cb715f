"""Wootters concurrence and entanglement of formation for two qubits.

The eigenproblems are solved by a cyclic Jacobi sweep on the 8x8 real
symmetric embedding [[Re, -Im], [Im, Re]] of the 4x4 Hermitian matrix,
so the package needs no linear-algebra backend on this path; numpy's
eigensolvers appear only as independent oracles in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .special import binary_entropy

__all__ = [
    "NotAStateError",
    "SpectralDecomposition",
    "hermitian_eigen",
    "psd_sqrt",
    "concurrence",
    "entanglement_of_formation",
    "SIGMAYY",
]

# sigma_y (x) sigma_y in the |00>,|01>,|10>,|11> product basis: the
# antidiagonal (-1, +1, +1, -1). Real, so conjugation commutes with it.
SIGMAYY = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)

_JACOBI_TOL = 1e-14
_MAX_SWEEPS = 50


class NotAStateError(ValueError):
    """Input matrix is not a valid density matrix."""


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (descending) and matching unitary eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _jacobi_real_symmetric(a: np.ndarray):
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Returns (eigenvalues, column eigenvectors), unsorted. Converges
    quadratically; tolerance is relative to the matrix norm so scaling
    the input does not change the iteration.
    """
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    scale = np.max(np.abs(a)) or 1.0
    for _ in range(_MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= _JACOBI_TOL * scale:
                    continue
                off = max(off, abs(apq))
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = np.sign(theta) / (abs(theta) + np.hypot(1.0, theta))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                a[p, q] = a[q, p] = 0.0
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
        if off <= _JACOBI_TOL * scale:
            break
    return np.diag(a).copy(), v


def _embed(m: np.ndarray) -> np.ndarray:
    re, im = m.real, m.imag
    return np.block([[re, -im], [im, re]])


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate so the first component above tolerance is real positive."""
    idx = np.flatnonzero(np.abs(vec) > 1e-8)
    k = idx[0] if idx.size else 0
    ph = vec[k] / abs(vec[k]) if abs(vec[k]) > 0 else 1.0
    return vec / ph


def hermitian_eigen(m: np.ndarray, tol: float = 1e-10) -> SpectralDecomposition:
    """Full spectral decomposition of a 4x4 complex Hermitian matrix.

    Eigenvalues descend; each eigenvector's first significant component
    is made real positive so the decomposition is deterministic.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"hermitian_eigen: expected a 4x4 matrix, got {m.shape}")
    scale = max(np.max(np.abs(m)), 1e-300)
    if np.max(np.abs(m - m.conj().T)) > tol * max(1.0, scale):
        raise ValueError("hermitian_eigen: matrix is not Hermitian within tolerance")

    herm = 0.5 * (m + m.conj().T)
    vals8, vecs8 = _jacobi_real_symmetric(_embed(herm))
    order = np.argsort(vals8)[::-1]
    vals8, vecs8 = vals8[order], vecs8[:, order]

    # Each complex eigenvector appears twice in the embedding (as (x; y)
    # and as i times it, (-y; x)); keep one representative per complex
    # direction. Greedy Gram-Schmidt with a shrinking acceptance
    # threshold: the projections of the 8 real eigenvectors always carry
    # total squared residual 2 * (missing complex dimensions), so some
    # candidate eventually clears the threshold and the loop terminates.
    cands = [vecs8[:4, i] + 1j * vecs8[4:, i] for i in range(8)]
    used = [False] * 8
    chosen_vals: list[float] = []
    chosen_vecs: list[np.ndarray] = []
    threshold = 0.4
    while len(chosen_vecs) < 4:
        progress = False
        for i in range(8):
            if used[i]:
                continue
            cand = cands[i].copy()
            for prev in chosen_vecs:
                cand = cand - prev * np.vdot(prev, cand)
            nrm = np.linalg.norm(cand)
            if nrm > threshold:
                used[i] = True
                chosen_vals.append(vals8[i])
                chosen_vecs.append(cand / nrm)
                progress = True
                if len(chosen_vecs) == 4:
                    break
        if not progress:
            threshold *= 0.5
            if threshold < 1e-6:
                raise RuntimeError("hermitian_eigen: eigenvector pairing failed")
    order = np.argsort(chosen_vals, kind="stable")[::-1]
    values = np.array(chosen_vals)[order]
    vectors = np.column_stack([_fix_phase(chosen_vecs[i]) for i in order])
    return SpectralDecomposition(eigenvalues=values, eigenvectors=vectors)


def _validate_state(rho: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise NotAStateError(f"expected a 4x4 density matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise NotAStateError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-6:
        raise NotAStateError(f"density matrix trace {np.trace(rho).real} != 1")
    return rho


def psd_sqrt(rho: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root of a density matrix.

    Eigenvalues below -1e-8 are rejected; the rest are clamped at
    1e-13 * max eigenvalue before the root. The relative clamp matters:
    +1e-17 rounding dirt in a pure state would otherwise grow to 3e-9
    under the square root and leak into the concurrence.
    """
    rho = np.asarray(rho, dtype=complex)
    dec = hermitian_eigen(rho)
    vals = dec.eigenvalues
    if np.min(vals) < -1e-8:
        raise NotAStateError(f"matrix is not PSD: min eigenvalue {np.min(vals):.3e}")
    floor = 1e-13 * max(np.max(vals), 0.0)
    vals = np.where(vals < floor, 0.0, vals)
    v = dec.eigenvectors
    return (v * np.sqrt(vals)) @ v.conj().T


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit state.

    C = max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)) with l_i the
    descending eigenvalues of rho * rho~, rho~ = (sy x sy) rho* (sy x sy).
    Evaluated through the Hermitian form sqrt(rho) rho~ sqrt(rho),
    factored as B'B with B = sqrt(rho~) sqrt(rho): rounding then enters
    at the level of B's entries, so sqrt(l_i) carries eps-level noise
    instead of sqrt(eps) for nearly separable states. sqrt(rho~) is
    (sy x sy) sqrt(rho)* (sy x sy), no second root needed.
    """
    rho = _validate_state(rho)
    root = psd_sqrt(rho)
    root_tilde = SIGMAYY @ root.conj() @ SIGMAYY
    b = root_tilde @ root
    m = b.conj().T @ b
    vals = hermitian_eigen(0.5 * (m + m.conj().T), tol=1e-8).eigenvalues
    # eigenvalues below eps * ||M|| (and the -1e-10 level negatives) are
    # indistinguishable from zero; without the floor their square roots
    # would inject sqrt(eps) ~ 1e-8 noise into the subtraction
    floor = 1e-14 * max(np.max(vals), 0.0)
    vals = np.where(vals < floor, 0.0, vals)
    roots = np.sqrt(vals)
    return float(max(0.0, roots[0] - roots[1] - roots[2] - roots[3]))


def entanglement_of_formation(rho: np.ndarray) -> float:
    """E = h((1 + sqrt(1 - C^2))/2) with h the binary entropy."""
    c = min(1.0, concurrence(rho))
    return float(binary_entropy((1.0 + np.sqrt(1.0 - c * c)) / 2.0))
