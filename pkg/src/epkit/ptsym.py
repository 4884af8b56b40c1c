"""PT-symmetric two-level model ``H = [[r e^{i theta}, s], [s, r e^{-i theta}]]``.

With ``sin(alpha) = (r/s) sin(theta)`` the model maps onto the reduced form
with ``Z = i sin(alpha)``, ``E0 = r cos(theta)`` and ``omega = s``.  The
exact phase is ``s^2 > r^2 sin^2(theta)`` (real ``alpha``), the EPs sit at
``alpha = +-pi/2``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BrokenSymmetry, DivergenceWarning, EPSingularC, ValidationError, ZeroCoupling
from .model import Hamiltonian2, _frozen
from .projective import ProjectivePoint

CLASS_TOL = 1e-12
DIVERGENCE_THRESHOLD = 1e6

P_MATRIX = np.array([[0, 1], [1, 0]], dtype=np.complex128)


# ---------------------------------------------------------------------------
# linear and antilinear operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Operator:
    """``v -> M v`` or, when ``antilinear``, ``v -> M conj(v)``."""

    matrix: np.ndarray
    antilinear: bool = False

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    def __call__(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.complex128)
        return self.matrix @ (np.conj(v) if self.antilinear else v)

    def __matmul__(self, other: "Operator") -> "Operator":
        if not isinstance(other, Operator):
            return NotImplemented
        right = np.conj(other.matrix) if self.antilinear else other.matrix
        return Operator(self.matrix @ right, self.antilinear != other.antilinear)

    def commutator_residual(self, h) -> float:
        """``max |(A H - H A) e_k|`` over the standard basis, with ``H`` linear."""
        h = np.asarray(h, dtype=np.complex128)
        h_eff = np.conj(h) if self.antilinear else h
        return float(np.max(np.abs(self.matrix @ h_eff - h @ self.matrix)))


P = Operator(P_MATRIX)
T = Operator(np.eye(2), antilinear=True)
PT = P @ T


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PTModel:
    r: float
    s: float
    theta: float
    symmetry: str
    sin_alpha: float
    alpha: complex
    cos_alpha: complex

    @property
    def e0(self) -> float:
        return self.r * math.cos(self.theta)

    @property
    def matrix(self) -> np.ndarray:
        a = self.r * cmath.exp(1j * self.theta)
        return np.array([[a, self.s], [self.s, a.conjugate()]], dtype=np.complex128)

    @property
    def hamiltonian(self) -> Hamiltonian2:
        a = self.r * cmath.exp(1j * self.theta)
        return Hamiltonian2(a, a.conjugate(), self.s)

    @property
    def z(self) -> complex:
        """Reduced parameter ``Z = i sin(alpha)``."""
        return 1j * self.sin_alpha

    @property
    def exact(self) -> bool:
        return self.symmetry == "exact"

    def pt_residual(self) -> float:
        return PT.commutator_residual(self.matrix)

    def to_json(self) -> dict:
        from .io import encode

        return encode({"r": self.r, "s": self.s, "theta": self.theta, "class": self.symmetry,
                       "alpha": self.alpha, "z": self.z})


def build_pt(r: float, s: float, theta: float, tol: float = CLASS_TOL) -> PTModel:
    """Classify as ``exact``, ``broken`` or ``ep`` by the sign of ``s^2 - r^2 sin^2(theta)``.

    In the broken phase ``alpha`` is the principal complex arcsine.
    """
    r, s, theta = float(r), float(s), float(theta)
    if s == 0:
        raise ZeroCoupling("PT model needs s != 0")
    sin_alpha = r / s * math.sin(theta)
    disc = s * s - (r * math.sin(theta)) ** 2
    if abs(disc) <= tol * s * s:
        symmetry = "ep"
        alpha = complex(math.copysign(math.pi / 2, sin_alpha))
        cos_alpha = 0j
        sin_alpha = math.copysign(1.0, sin_alpha)
    elif disc > 0:
        symmetry = "exact"
        alpha = complex(math.asin(sin_alpha))
        cos_alpha = complex(math.sqrt(disc) / abs(s))
    else:
        symmetry = "broken"
        alpha = cmath.asin(sin_alpha)
        cos_alpha = cmath.cos(alpha)
    return PTModel(r, s, theta, symmetry, sin_alpha, alpha, cos_alpha)


@dataclass(frozen=True)
class PTSpectrum:
    e_plus: complex
    e_minus: complex
    v_plus: np.ndarray | None
    v_minus: np.ndarray | None
    symmetry: str


def eigenvector_scales(alpha: float, cos_alpha: float | None = None) -> tuple[complex, complex]:
    """``c_+ = e^{i alpha/2} / sqrt(2 cos alpha)`` and ``c_- = i e^{-i alpha/2} / sqrt(2 cos alpha)``."""
    cos_alpha = math.cos(alpha) if cos_alpha is None else cos_alpha
    root = math.sqrt(2 * cos_alpha)
    return cmath.exp(0.5j * alpha) / root, 1j * cmath.exp(-0.5j * alpha) / root


def pt_lines(alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """``chi_+ = (1, e^{-i alpha})``, ``chi_- = (1, -e^{i alpha})``."""
    return (
        np.array([1.0, cmath.exp(-1j * alpha)], dtype=np.complex128),
        np.array([1.0, -cmath.exp(1j * alpha)], dtype=np.complex128),
    )


def pt_spectrum(m: PTModel) -> PTSpectrum:
    """``E_pm = r cos(theta) +- sqrt(s^2 - r^2 sin^2(theta))`` and, in the exact phase, the
    Krein-normalized eigenvectors.

    The vectors are the eigenvectors of ``E0 +- s cos(alpha)``; for ``s < 0``
    these are exchanged relative to the ``E_pm`` labels, so they are swapped
    to keep ``H v_pm = E_pm v_pm``.
    """
    root = cmath.sqrt(m.s * m.s - (m.r * math.sin(m.theta)) ** 2)
    e_plus, e_minus = m.e0 + root, m.e0 - root
    if m.symmetry != "exact":
        return PTSpectrum(e_plus, e_minus, None, None, m.symmetry)
    alpha = m.alpha.real
    cp, cm = eigenvector_scales(alpha, m.cos_alpha.real)
    xp, xm = pt_lines(alpha)
    vp, vm = cp * xp, cm * xm
    if m.s < 0:
        vp, vm = vm, vp
    return PTSpectrum(e_plus, e_minus, vp, vm, m.symmetry)


# ---------------------------------------------------------------------------
# C operator and inner products
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class COperator:
    matrix: np.ndarray
    alpha: float
    cos_alpha: float

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))

    @property
    def divergence(self) -> float:
        """``1/|cos alpha|``, the growth rate of ``||C||`` towards the EP."""
        return 1 / abs(self.cos_alpha)

    @property
    def operator(self) -> Operator:
        return Operator(self.matrix)

    def invariants(self, m: PTModel | None = None) -> dict[str, float]:
        c = self.matrix
        c_sq = float(np.max(np.abs(c @ c - np.eye(2))))
        # near the EP the entries grow like 1/cos(alpha); the relative form stays meaningful
        out = {"c_squared": c_sq, "c_squared_relative": c_sq / self.norm**2}
        if m is not None:
            h = m.matrix
            out["commutator"] = float(np.max(np.abs(c @ h - h @ c)))
            recon = m.e0 * np.eye(2) + m.s * self.cos_alpha * c
            out["decomposition"] = float(np.max(np.abs(h - recon)))
        return out


def c_operator_from_alpha(
    alpha: float, cos_alpha: float | None = None, threshold: float = DIVERGENCE_THRESHOLD
) -> COperator:
    """``C = (1/cos alpha) [[i sin alpha, 1], [1, -i sin alpha]]`` for real ``alpha``."""
    alpha = float(alpha)
    cos_alpha = math.cos(alpha) if cos_alpha is None else float(cos_alpha)
    if cos_alpha == 0:
        raise EPSingularC("C is singular at the EP (cos alpha = 0)")
    sin_alpha = math.sin(alpha)
    c = np.array([[1j * sin_alpha, 1], [1, -1j * sin_alpha]], dtype=np.complex128) / cos_alpha
    if 1 / abs(cos_alpha) > threshold:
        warnings.warn(
            f"||C|| ~ 1/|cos alpha| = {1 / abs(cos_alpha):.3e}: approaching the EP",
            DivergenceWarning,
            stacklevel=2,
        )
    return COperator(c, alpha, cos_alpha)


def build_c_operator(m: PTModel, threshold: float = DIVERGENCE_THRESHOLD) -> COperator:
    if m.symmetry == "ep":
        raise EPSingularC("C-induced map breaks down at the EP")
    if m.symmetry == "broken":
        raise BrokenSymmetry("C operator is defined in the exact PT phase only")
    return c_operator_from_alpha(m.alpha.real, m.cos_alpha.real, threshold)


def krein_product(u, v) -> complex:
    """Indefinite product ``(u, v) = (PT u) . v`` (bilinear dot)."""
    return complex(PT(u) @ np.asarray(v, dtype=np.complex128))


def cpt_product(c: PTModel | COperator, u, v) -> complex:
    """Positive product ``((u, v)) = (CPT u) . v``."""
    if isinstance(c, PTModel):
        c = build_c_operator(c)
    cpt = c.operator @ PT
    return complex(cpt(u) @ np.asarray(v, dtype=np.complex128))


def product_table(m: PTModel) -> dict[str, np.ndarray]:
    """Krein and CPT Gram matrices of the exact-phase eigenvectors (rows/cols ``+``, ``-``)."""
    spec = pt_spectrum(m)
    if spec.v_plus is None:
        raise BrokenSymmetry(f"no exact-phase eigenvectors ({m.symmetry})")
    c = build_c_operator(m)
    vs = (spec.v_plus, spec.v_minus)
    return {
        "krein": np.array([[krein_product(a, b) for b in vs] for a in vs]),
        "cpt": np.array([[cpt_product(c, a, b) for b in vs] for a in vs]),
    }


# ---------------------------------------------------------------------------
# projective picture
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PTEmbedding:
    point: ProjectivePoint
    kappa: int
    line_product: complex
    conic_residual: complex


def pt_embed(m: PTModel | float, branch: int = 1) -> PTEmbedding:
    """``|E_pm> -> (chi_pm, 1/c_pm)`` with the generalized conic
    ``PT chi . chi - kappa conj(c^-1) c^-1``.

    ``kappa = +-1`` is the Krein signature of the branch, so the residual
    vanishes on both branches.  At the EP ``1/c = 0`` and ``chi`` is
    PT-isotropic.  Accepts a model or a real ``alpha``.
    """
    if branch not in (1, -1):
        raise ValidationError("branch must be +1 or -1")
    if isinstance(m, PTModel):
        if m.symmetry == "broken":
            raise BrokenSymmetry("PT embedding is defined in the exact phase and at the EP")
        alpha, cos_alpha = m.alpha.real, m.cos_alpha.real
    else:
        alpha = float(m)
        cos_alpha = math.cos(alpha)
    chi = pt_lines(alpha)[0 if branch == 1 else 1]
    root = math.sqrt(max(2 * cos_alpha, 0.0))
    inv_c = root * cmath.exp(-0.5j * alpha) if branch == 1 else -1j * root * cmath.exp(0.5j * alpha)
    line_product = krein_product(chi, chi)
    residual = line_product - branch * (inv_c.conjugate() * inv_c)
    point = ProjectivePoint(np.array([chi[0], chi[1], inv_c]))
    return PTEmbedding(point, branch, line_product, residual)
