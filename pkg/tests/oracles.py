"""Reference implementations that share no code with epkit.

They are deliberately naive: characteristic polynomials, dense LAPACK
eigensolvers and brute-force quadrature with per-sample eigen-solves.
"""

from __future__ import annotations

import cmath
import math

import numpy as np


def charpoly_eigenvalues(m) -> tuple[complex, complex]:
    """Roots of ``x^2 - tr(m) x + det(m)`` by the quadratic formula."""
    m = np.asarray(m, dtype=np.complex128)
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    root = cmath.sqrt(tr * tr - 4 * det)
    return (tr + root) / 2, (tr - root) / 2


def polyroots_eigenvalues(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    return np.roots([1.0, -(m[0, 0] + m[1, 1]), m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]])


def dense_eig(m) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eig(np.asarray(m, dtype=np.complex128))


def set_match_error(a, b) -> float:
    """Relative mismatch of two 2-element eigenvalue sets (best pairing)."""
    a = list(a)
    b = list(b)
    scale = max(1.0, *(abs(x) for x in a + b))
    direct = max(abs(a[0] - b[0]), abs(a[1] - b[1]))
    crossed = max(abs(a[0] - b[1]), abs(a[1] - b[0]))
    return min(direct, crossed) / scale


def reduced_matrix(e0: complex, z: complex, omega: complex) -> np.ndarray:
    return np.array([[e0 + omega * z, omega], [omega, e0 - omega * z]], dtype=np.complex128)


def brute_force_loop_phase(z_c: complex, radius: float, turns: int, n: int = 20000) -> complex:
    """Geometric phase by dense eigenvectors at every sample.

    Eigenvectors are followed by maximal overlap, brought to ``(1, w)`` form
    and the phase ``(i/2) d ln(1 + w^2)`` is accumulated with the continuous
    logarithm of successive ratios.  Traverses the line's closed cycle (twice
    the turns when the line comes back swapped) and divides by the repeats.
    """
    def run(total_turns):
        alphas = np.linspace(0.0, 2 * math.pi * total_turns, n * total_turns + 1)
        prev = None
        acc = 0j
        first = None
        for a in alphas:
            z = z_c + radius * cmath.exp(1j * a)
            _, vecs = dense_eig(reduced_matrix(0, z, 0.5))
            cols = [vecs[:, k] / vecs[0, k] for k in range(2)]
            if prev is None:
                # start on the principal "+" line w = -Z + sqrt(Z^2+1)
                target = -z + cmath.sqrt(z * z + 1)
                chi = min(cols, key=lambda c: abs(c[1] - target))
                first = chi
            else:
                chi = min(cols, key=lambda c: abs(c[1] - prev[1]))
                b_prev = 1 + prev[1] ** 2
                b_cur = 1 + chi[1] ** 2
                acc += 0.5j * cmath.log(b_cur / b_prev)
            prev = chi
        return acc, first, prev

    acc, first, last = run(turns)
    if abs(last[1] - first[1]) < 1e-6:
        return acc
    acc2, _, _ = run(2 * turns)
    return acc2 / 2


def pt_dense_check(r: float, s: float, theta: float):
    """Dense eigenvalues of the PT matrix, sorted by real part then imaginary part."""
    a = r * cmath.exp(1j * theta)
    m = np.array([[a, s], [s, a.conjugate()]])
    vals = np.linalg.eigvals(m)
    return sorted(vals, key=lambda x: (round(x.real, 12), x.imag))
