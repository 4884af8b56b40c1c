"""Homogeneous coordinates for normalized states, chart selection and EP asymptotics.

A state ``Phi = c (1, w)`` is sent to the point ``(1, w, 1/c)`` of the
projective plane.  Normalized states (``c^2 chi^T chi = 1``) lie on the conic
``u0^2 + u1^2 - u2^2 = 0``; the EP line ``(1, -Z_c)`` with ``|c| -> oo`` is
the finite point ``(1, -Z_c, 0)`` on the same conic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError, ZeroVector
from .model import _frozen, affine_roots

CHART_ETA = 1e-6
CHARTS = ("U0", "U1", "U2")


@dataclass(frozen=True)
class ProjectivePoint:
    """Point ``[u0 : u1 : u2]``; the stored representative is left unnormalized."""

    u: np.ndarray

    def __post_init__(self):
        u = _frozen(np.asarray(self.u, dtype=np.complex128).reshape(3))
        if not np.any(u != 0):
            raise ZeroVector("homogeneous coordinates cannot all vanish")
        object.__setattr__(self, "u", u)

    @property
    def u0(self) -> complex:
        return complex(self.u[0])

    @property
    def u1(self) -> complex:
        return complex(self.u[1])

    @property
    def u2(self) -> complex:
        return complex(self.u[2])

    @property
    def chart(self) -> str:
        return select_chart(self)

    def normalized(self) -> np.ndarray:
        """Representative rescaled so that its largest coordinate has modulus one."""
        return self.u / np.max(np.abs(self.u))

    def scaled(self, lam: complex) -> "ProjectivePoint":
        if lam == 0:
            raise ValidationError("projective rescaling needs lambda != 0")
        return ProjectivePoint(lam * self.u)

    def affine(self, chart: str | None = None) -> np.ndarray:
        """Inhomogeneous coordinates in ``chart`` (the selected chart by default)."""
        chart = chart or self.chart
        k = CHARTS.index(chart)
        if self.u[k] == 0:
            raise ValidationError(f"point is not in chart {chart}")
        return np.delete(self.u / self.u[k], k)

    def same_point(self, other: "ProjectivePoint", tol: float = 1e-12) -> bool:
        a, b = self.normalized(), other.normalized()
        cross = np.abs(np.outer(a, b) - np.outer(b, a))
        return bool(np.max(cross) <= tol)

    @property
    def line(self) -> np.ndarray:
        """Line part ``(u0, u1)``."""
        return self.u[:2].copy()

    def to_json(self) -> dict:
        from .io import encode

        return encode({"u": self.u, "chart": self.chart, "conic_residual": conic_residual(self)})


def embed(phi) -> ProjectivePoint:
    """``Phi = (z0, z1) -> (1, z1/z0, 1/z0)``, or ``(0, 1, 1/z1)`` when ``z0 = 0``."""
    phi = np.asarray(phi, dtype=np.complex128).reshape(2)
    z0, z1 = complex(phi[0]), complex(phi[1])
    if z0 == 0 and z1 == 0:
        raise ZeroVector("the zero vector has no projective image")
    if z0 != 0:
        return ProjectivePoint(np.array([1.0, z1 / z0, 1.0 / z0]))
    return ProjectivePoint(np.array([0.0, 1.0, 1.0 / z1]))


def from_line(chi, inv_scale: complex = 0.0) -> ProjectivePoint:
    """Point ``(chi, 1/c)`` given a line representative and an inverse scale (0 at an EP)."""
    chi = np.asarray(chi, dtype=np.complex128).reshape(2)
    return ProjectivePoint(np.array([chi[0], chi[1], inv_scale]))


def select_chart(p: ProjectivePoint, eta: float = CHART_ETA) -> str:
    """``U2`` if ``|u2|`` is at least ``eta`` times the line part, else the larger of ``U0``/``U1``."""
    a0, a1, a2 = (abs(x) for x in p.u)
    line = max(a0, a1)
    if line == 0 or a2 / line >= eta:
        return "U2"
    return "U0" if a0 >= a1 else "U1"


def conic_residual(p: ProjectivePoint) -> complex:
    """``u0^2 + u1^2 - u2^2`` on the stored representative."""
    u0, u1, u2 = p.u
    return complex(u0 * u0 + u1 * u1 - u2 * u2)


def on_conic(p: ProjectivePoint, tol: float = 1e-10) -> bool:
    """Scale-free membership test (evaluated on the max-modulus representative)."""
    u0, u1, u2 = p.normalized()
    return abs(u0 * u0 + u1 * u1 - u2 * u2) <= tol


# ---------------------------------------------------------------------------
# instantaneous normalization near an EP
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticScales:
    eps: complex
    z_c: complex
    c_plus_sq: complex
    c_minus_sq: complex
    ratio: complex
    exact_c_plus_sq: complex
    exact_c_minus_sq: complex
    exact_ratio: complex
    norm_sq_plus: float
    norm_sq_minus: float
    norm_sq_asymptote: float

    @property
    def relative_phase(self) -> complex:
        """``c_+ / c_-`` from the exact scales (tends to ``+-i``)."""
        return cmath.sqrt(self.exact_c_plus_sq) / cmath.sqrt(self.exact_c_minus_sq)


def instantaneous_asymptotics(eps: complex, z_c: complex = 1j) -> AsymptoticScales:
    """Leading-order and exact instantaneous scales ``c_pm^2 = 1 / chi_pm^T chi_pm`` at ``Z = Z_c + eps``.

    ``s = sqrt(eps (2 Z_c + eps))`` avoids the cancellation in ``Z^2 + 1``,
    and ``1 + w_pm^2 = +-2 s w_pm`` keeps the binorms accurate.
    """
    eps, z_c = complex(eps), complex(z_c)
    if eps == 0:
        raise ValidationError("asymptotics need eps != 0")
    if abs(z_c * z_c + 1) > 1e-12:
        raise ValidationError("z_c must be +-i")
    lead = 2**-1.5 * z_c**-1.5 / cmath.sqrt(eps)
    s = cmath.sqrt(eps) * cmath.sqrt(2 * z_c + eps)
    wp, wm = affine_roots(z_c + eps, s)
    cp2 = 1 / (2 * s * wp)
    cm2 = -1 / (2 * s * wm)
    return AsymptoticScales(
        eps=eps,
        z_c=z_c,
        c_plus_sq=-lead,
        c_minus_sq=lead,
        ratio=-1.0 + 0j,
        exact_c_plus_sq=cp2,
        exact_c_minus_sq=cm2,
        exact_ratio=cp2 / cm2,
        norm_sq_plus=abs(cp2) * (1 + abs(wp) ** 2),
        norm_sq_minus=abs(cm2) * (1 + abs(wm) ** 2),
        norm_sq_asymptote=abs(2 * eps) ** -0.5,
    )


# ---------------------------------------------------------------------------
# phase jump along a straight segment past the EP
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrajectorySegment:
    """``eps(s) = exp(i alpha0) (rho + i s)`` for ``s`` in ``s_range``."""

    rho: float
    alpha0: float = 0.0
    s_range: tuple[float, float] = (-0.1, 0.1)

    def __post_init__(self):
        if not self.rho > 0:
            raise ValidationError("segment distance rho must be positive")
        lo, hi = self.s_range
        if not lo < hi:
            raise ValidationError("s_range must be increasing")

    def eps(self, s):
        return cmath.exp(1j * self.alpha0) * (self.rho + 1j * np.asarray(s, dtype=float))


@dataclass(frozen=True)
class JumpProfile:
    s: np.ndarray
    theta: np.ndarray
    abs_eps: np.ndarray
    phase_factor: np.ndarray

    @property
    def swing(self) -> float:
        return float(self.theta[-1] - self.theta[0])

    def rows(self):
        return zip(self.s, self.theta, self.abs_eps)


def phase_jump_profile(seg: TrajectorySegment, n_samples: int = 401) -> JumpProfile:
    """``theta(s) = atan2(s, rho) / 4`` and the ``eps^(-1/4)`` phase factor along the segment."""
    if n_samples < 2:
        raise ValidationError("need at least two samples")
    s = np.linspace(seg.s_range[0], seg.s_range[1], n_samples)
    theta = 0.25 * np.arctan2(s, seg.rho)
    abs_eps = np.hypot(seg.rho, s)
    factor = np.exp(-0.25j * seg.alpha0 - 1j * theta)
    return JumpProfile(s, theta, abs_eps, factor)


def step_limit(s) -> np.ndarray:
    """Pointwise ``rho -> 0`` limit ``(pi/4)(Theta(s) - 1/2)`` (zero at ``s = 0``)."""
    s = np.asarray(s, dtype=float)
    return (math.pi / 8) * np.sign(s)
