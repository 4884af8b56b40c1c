"""Exceptional-point detection, Jordan chains and the Jordan-block similarity frame."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCoupling, NotAtEP, ZeroScale
from .model import EP_TOL, Hamiltonian2, _frozen

S2 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
J2 = np.array([[0, 1], [0, 0]], dtype=np.complex128)


def detect_ep(h: Hamiltonian2, tol: float = EP_TOL) -> tuple[complex, int] | None:
    """Return ``(Z_c, mu)`` with ``Z_c = mu*i`` if ``|Z - Z_c| < tol``, else ``None``."""
    if h.is_diagonal:
        raise DegenerateCoupling("EP detection needs omega != 0")
    z = h.z
    for mu in (1, -1):
        if abs(z - mu * 1j) < tol:
            return complex(mu * 1j), mu
    return None


def chain_sigma(mu: int) -> complex:
    return cmath.exp(1j * mu * cmath.pi / 4) / cmath.sqrt(2)


def chain_q(omega: complex) -> complex:
    return cmath.sqrt(2 * complex(omega))


@dataclass(frozen=True)
class RootChain:
    """Right and left root vectors of the 2x2 Jordan block at an EP.

    ``phi1`` is the representative with no admixture of ``phi0``; any
    ``phi1 + a*phi0`` is an equally valid associated vector (see
    :meth:`shifted`).
    """

    z_c: complex
    mu: int
    sigma: complex
    q: complex
    c0: complex
    d0: complex
    e0: complex
    omega: complex
    phi0: np.ndarray
    phi1: np.ndarray
    xi0: np.ndarray
    xi1: np.ndarray

    def __post_init__(self):
        for name in ("phi0", "phi1", "xi0", "xi1"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def m(self) -> np.ndarray:
        """``H(Z_c) - E0 I``."""
        return self.omega * np.array(
            [[self.z_c, 1], [1, -self.z_c]], dtype=np.complex128
        )

    def residuals(self) -> dict[str, float]:
        m = self.m
        mh = m.conj().T
        return {
            "right_eigen": float(np.max(np.abs(m @ self.phi0))),
            "right_chain": float(np.max(np.abs(m @ self.phi1 - self.phi0))),
            "left_eigen": float(np.max(np.abs(mh @ self.xi0))),
            "left_chain": float(np.max(np.abs(mh @ self.xi1 - self.xi0))),
            "isotropy": float(abs(self.phi0 @ self.phi0)),
        }

    def biorthogonal_table(self) -> np.ndarray:
        """``<Xi_k|Phi_l>`` for ``k, l`` in (0, 1)."""
        xis = (self.xi0, self.xi1)
        phis = (self.phi0, self.phi1)
        return np.array([[np.vdot(x, p) for p in phis] for x in xis])

    def shifted(self, a: complex) -> "RootChain":
        """Chain with ``phi1 -> phi1 + a*phi0`` (the associated-vector gauge freedom)."""
        return RootChain(
            self.z_c, self.mu, self.sigma, self.q, self.c0, self.d0, self.e0,
            self.omega, self.phi0, self.phi1 + a * self.phi0, self.xi0, self.xi1,
        )

    def to_json(self) -> dict:
        from .io import encode

        return encode(
            {
                "z_c": self.z_c,
                "mu": self.mu,
                "sigma": self.sigma,
                "q": self.q,
                "c0": self.c0,
                "d0": self.d0,
                "phi0": self.phi0,
                "phi1": self.phi1,
                "xi0": self.xi0,
                "xi1": self.xi1,
                "residuals": self.residuals(),
            }
        )


def _require_ep(h: Hamiltonian2, tol: float) -> tuple[complex, int]:
    found = detect_ep(h, tol)
    if found is None:
        raise NotAtEP(f"Z = {h.z} is not within {tol:g} of +-i")
    return found


def build_root_chain(
    h: Hamiltonian2, c0: complex = 1.0, d0: complex = 1.0, tol: float = EP_TOL
) -> RootChain:
    z_c, mu = _require_ep(h, tol)
    c0, d0 = complex(c0), complex(d0)
    if c0 == 0 or d0 == 0:
        raise ZeroScale("chain scales c0, d0 must be nonzero")
    sigma = chain_sigma(mu)
    q = chain_q(h.omega)
    qc = q.conjugate()
    down = np.array([1, -z_c], dtype=np.complex128)
    up = np.array([-z_c, 1], dtype=np.complex128)
    return RootChain(
        z_c=z_c,
        mu=mu,
        sigma=sigma,
        q=q,
        c0=c0,
        d0=d0,
        e0=h.e0,
        omega=h.omega,
        phi0=sigma * q * c0 * down,
        phi1=sigma / q * c0 * up,
        xi0=sigma * qc * d0.conjugate() * up,
        xi1=sigma / qc * d0.conjugate() * down,
    )


@dataclass(frozen=True)
class JordanFrame:
    """Similarity frame ``M = P R J2 R^-1 P^-1`` of the EP block."""

    z_c: complex
    mu: int
    m: np.ndarray
    p_matrix: np.ndarray
    r_matrix: np.ndarray
    theta_matrix: np.ndarray
    psi_matrix: np.ndarray
    s2: np.ndarray = S2
    j2: np.ndarray = J2

    def __post_init__(self):
        for name in ("m", "p_matrix", "r_matrix", "theta_matrix", "psi_matrix", "s2", "j2"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def reconstruct(self) -> np.ndarray:
        p, r = self.p_matrix, self.r_matrix
        return p @ r @ self.j2 @ np.linalg.inv(r) @ np.linalg.inv(p)

    @property
    def reconstruction_residual(self) -> float:
        return float(np.max(np.abs(self.m - self.reconstruct())))

    def invariants(self) -> dict[str, float]:
        p = self.p_matrix
        p_inv = np.linalg.inv(p)
        psi, theta = self.psi_matrix, self.theta_matrix
        return {
            "p_symmetric": float(np.max(np.abs(p - p.T))),
            "p_unitary": float(np.max(np.abs(p - p_inv.conj().T))),
            "p_squared": float(np.max(np.abs(p @ p - self.s2))),
            "reconstruction": self.reconstruction_residual,
            "psi_theta": float(np.max(np.abs(psi.conj().T @ theta - self.s2))),
            "psi_tilde_theta": float(
                np.max(np.abs((psi @ self.s2).conj().T @ theta - np.eye(2)))
            ),
        }

    def root_vectors(self) -> dict[str, np.ndarray]:
        """Chain vectors of ``M`` mapped from the Jordan-block chains."""
        pr = self.p_matrix @ self.r_matrix
        pl = self.p_matrix @ np.linalg.inv(self.r_matrix).conj().T
        return {
            "phi0": pr @ self.theta_matrix[:, 0],
            "phi1": pr @ self.theta_matrix[:, 1],
            "xi0": pl @ self.psi_matrix[:, 0],
            "xi1": pl @ self.psi_matrix[:, 1],
        }

    def to_json(self) -> dict:
        from .io import encode

        return encode(
            {
                "P": self.p_matrix,
                "R": self.r_matrix,
                "S2": self.s2,
                "J2": self.j2,
                "Theta": self.theta_matrix,
                "Psi": self.psi_matrix,
                "invariants": self.invariants(),
            }
        )


def build_jordan_frame(
    h: Hamiltonian2,
    c0: complex = 1.0,
    d0: complex = 1.0,
    c1: complex = 0.0,
    d1: complex = 0.0,
    tol: float = EP_TOL,
) -> JordanFrame:
    z_c, mu = _require_ep(h, tol)
    sigma = chain_sigma(mu)
    q = chain_q(h.omega)
    p = sigma * np.array([[1, -1j * mu], [-1j * mu, 1]], dtype=np.complex128)
    r = np.diag([q, 1 / q])
    theta = np.array([[c0, c1], [0, c0]], dtype=np.complex128)
    psi = np.array([[0, np.conj(d0)], [np.conj(d0), np.conj(d1)]], dtype=np.complex128)
    m = h.omega * np.array([[z_c, 1], [1, -z_c]], dtype=np.complex128)
    return JordanFrame(z_c, mu, m, p, r, theta, psi)
