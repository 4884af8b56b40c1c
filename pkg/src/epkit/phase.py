"""Geometric and dynamical phases along loops around an EP, and the loop transport matrices.

Loops live in the reduced parameter ``Z = center + eps(t)`` with
``eps = r(t) exp(i alpha(t))``.  On an eigen-line ``chi = (1, w)`` the
connection one-form is

    d gamma = i chi^T d chi / chi^T chi = (i/2) d ln(1 + w^2).

Around an EP the eigen-line only closes after an even number of turns; the
phases reported for a loop are therefore accumulated over the closed cycle
of the line (the loop run twice when the requested turns leave it on the
other sheet) and quoted per requested traversal.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import (
    EPCollision,
    IsotropicPoint,
    NoConvergence,
    SingularFrame,
    StepRejected,
    ValidationError,
)
from .model import EP_TOL, Hamiltonian2, _frozen, eigen_decompose

ISOTROPY_TOL = 1e-12


# ---------------------------------------------------------------------------
# loop parametrization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LoopPath:
    """``eps(t) = r(t) exp(i alpha(t))`` for ``t`` in ``[0, duration]``.

    ``alpha`` is unwrapped (``alpha0 + 2 pi turns t / duration``) and the
    radius may oscillate, ``r(t) = radius (1 + radial_amplitude sin(2 pi m t / duration))``.
    """

    center: complex
    radius: float
    turns: float = 1
    alpha0: float = 0.0
    duration: float = 2 * math.pi
    radial_amplitude: float = 0.0
    radial_harmonic: int = 1

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if self.radius <= 0:
            raise ValidationError("loop radius must be positive")
        if self.duration <= 0:
            raise ValidationError("loop duration must be positive")
        if abs(self.radial_amplitude) >= 1:
            raise ValidationError("|radial_amplitude| must be < 1 to keep r(t) > 0")

    @property
    def _omega_r(self) -> float:
        return 2 * math.pi * self.radial_harmonic / self.duration

    @property
    def _omega_a(self) -> float:
        return 2 * math.pi * self.turns / self.duration

    def alpha(self, t):
        return self.alpha0 + self._omega_a * np.asarray(t, dtype=float)

    def r(self, t):
        t = np.asarray(t, dtype=float)
        return self.radius * (1 + self.radial_amplitude * np.sin(self._omega_r * t))

    def dr(self, t):
        t = np.asarray(t, dtype=float)
        return self.radius * self.radial_amplitude * self._omega_r * np.cos(self._omega_r * t)

    def eps(self, t):
        return self.r(t) * np.exp(1j * self.alpha(t))

    def deps(self, t):
        return (self.dr(t) + 1j * self.r(t) * self._omega_a) * np.exp(1j * self.alpha(t))

    def sqrt_eps(self, t):
        """``eps^(1/2)`` continued with the unwrapped angle."""
        return np.sqrt(self.r(t)) * np.exp(0.5j * self.alpha(t))

    def z(self, t):
        return self.center + self.eps(t)

    def samples(self, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``n + 1`` equispaced samples ``(t, eps, alpha)`` including both endpoints."""
        t = np.linspace(0.0, self.duration, n + 1)
        alpha = self.alpha(t)
        if n > 0 and np.max(np.abs(np.diff(alpha))) >= math.pi:
            raise ValidationError("sampling too coarse: angular step >= pi")
        return t, self.eps(t), alpha

    @property
    def closed(self) -> bool:
        whole = abs(self.turns - round(self.turns)) < 1e-12
        r_back = abs(float(self.r(self.duration)) - float(self.r(0.0))) <= 1e-12 * self.radius
        return whole and r_back

    @property
    def max_radius(self) -> float:
        return self.radius * (1 + abs(self.radial_amplitude))

    @property
    def center_is_ep(self) -> bool:
        return abs(self.center - 1j) < 1e-12 or abs(self.center + 1j) < 1e-12


def circle_loop(center: complex, radius: float, turns: float = 1, alpha0: float = 0.0) -> LoopPath:
    return LoopPath(center, radius, turns, alpha0, duration=2 * math.pi * abs(turns) or 1.0)


def _ep_center(path: LoopPath) -> complex:
    return 1j if abs(path.center - 1j) < 1e-12 else -1j


def continued_root(path: LoopPath, t: np.ndarray, ep_tol: float = EP_TOL) -> np.ndarray:
    """``sqrt(Z^2 + 1)`` continued along the loop, ``+`` sheet at ``t = 0``.

    For loops centered on an EP the root is factored as
    ``eps^(1/2) * sqrt(2 Z_c + eps)`` with the unwrapped angle; elsewhere the
    principal root is sign-continued sample to sample.
    """
    z = path.z(t)
    disc = z * z + 1
    if np.any(np.abs(disc) < ep_tol):
        raise EPCollision("loop passes through the EP tolerance ball")
    if path.center_is_ep:
        if path.max_radius >= 2:
            raise ValidationError("loop around an EP must stay closer than the other EP (r < 2)")
        z_c = _ep_center(path)
        return path.sqrt_eps(t) * np.sqrt(2 * z_c + path.eps(t))
    root = np.sqrt(disc)
    return root * kernels.continue_signs(root)


# ---------------------------------------------------------------------------
# connection one-form
# ---------------------------------------------------------------------------

def connection_form(w, dw, tol: float = ISOTROPY_TOL):
    """``d gamma = (i/2) d ln(1 + w^2) = i w dw / (1 + w^2)``."""
    w = np.asarray(w, dtype=np.complex128)
    dw = np.asarray(dw, dtype=np.complex128)
    denom = 1 + w * w
    if np.any(np.abs(denom) < tol):
        raise IsotropicPoint("connection undefined on an isotropic line (w = +-i)")
    out = 1j * w * dw / denom
    return complex(out) if out.ndim == 0 else out


def section_connection(phi, dphi, xi):
    """Connection from arbitrary sections: ``-i dz0/z0 + i <Xi|dPhi>/<Xi|Phi>``.

    Independent of the scale factors of ``Phi`` and ``Xi`` (fiber independence).
    """
    phi = np.asarray(phi, dtype=np.complex128)
    dphi = np.asarray(dphi, dtype=np.complex128)
    xi = np.asarray(xi, dtype=np.complex128)
    num = np.sum(np.conj(xi) * dphi, axis=-1)
    den = np.sum(np.conj(xi) * phi, axis=-1)
    if np.any(np.abs(den) < ISOTROPY_TOL):
        raise IsotropicPoint("<Xi|Phi> vanishes")
    return -1j * dphi[..., 0] / phi[..., 0] + 1j * num / den


# ---------------------------------------------------------------------------
# adaptive trapezoid
# ---------------------------------------------------------------------------

def trapezoid_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    t_end: float,
    tol: float = 1e-6,
    n0: int = 64,
    max_doublings: int = 16,
    t_start: float = 0.0,
) -> tuple[complex, int]:
    """Composite trapezoid with interval doubling until ``|I_N - I_2N| < tol``.

    Returns the integral and the number of intervals used.  Function values
    from coarser levels are reused.
    """
    n = n0
    t = np.linspace(t_start, t_end, n + 1)
    v = f(t)
    edge = 0.5 * (v[0] + v[-1])
    interior = v[1:-1].sum()
    h = (t_end - t_start) / n
    prev = h * (edge + interior)
    for _ in range(max_doublings):
        mids = t_start + (np.arange(n) + 0.5) * h
        interior += f(mids).sum()
        n *= 2
        h *= 0.5
        cur = h * (edge + interior)
        if abs(cur - prev) < tol:
            return complex(cur), n
        prev = cur
    raise NoConvergence(f"trapezoid did not converge to {tol:g} with {n} intervals")


def cumulative_trapezoid(v: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros(len(v), dtype=np.complex128)
    out[1:] = np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(t))
    return out


# ---------------------------------------------------------------------------
# loop phases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseResult:
    gamma: complex
    dynamical: complex
    total: complex
    branch: int = 1
    turns: float = 1
    samples_used: int = 0
    cycle_repeats: int = 1
    gamma_open: complex | None = None


def _cycle_repeats(path: LoopPath) -> int:
    """1 if the eigen-line is back on its sheet after the loop, else 2."""
    if not path.closed:
        raise ValidationError("phase integration needs a closed loop (integer turns, r(T) = r(0))")
    n = max(64, int(64 * abs(path.turns)))
    t = np.linspace(0.0, path.duration, n + 1)
    s = continued_root(path, t)
    return 1 if abs(s[-1] - s[0]) <= abs(s[-1] + s[0]) else 2


def _geometric_integrand(path: LoopPath, branch: int):
    def f(t):
        s = branch * continued_root(path, t)
        return kernels.connection_integrand(path.z(t), s, path.deps(t))

    return f


def integrate_loop_phase(
    path: LoopPath,
    e0: complex = 0.0,
    omega: complex = 0.5,
    branch: int = 1,
    tol: float = 1e-6,
    n0: int = 64,
    max_doublings: int = 16,
) -> PhaseResult:
    """Geometric, dynamical and total phase of the ``branch`` eigenvector along a closed loop.

    The Hamiltonian family is ``H(eps) = e0 I + omega [[Z, 1], [1, -Z]]`` with
    ``Z = path.center + eps``.  The geometric part only depends on ``Z``.
    """
    repeats = _cycle_repeats(path)
    t_end = repeats * path.duration
    f = _geometric_integrand(path, branch)
    gamma_cycle, n_used = trapezoid_adaptive(f, t_end, tol, n0, max_doublings)
    omega = complex(omega)
    e0 = complex(e0)

    def energy(t):
        return -(e0 + omega * branch * continued_root(path, t))

    dyn_cycle, n_dyn = trapezoid_adaptive(energy, t_end, tol, n0, max_doublings)
    gamma_open, _ = trapezoid_adaptive(f, path.duration, tol, n0, max_doublings)
    gamma = gamma_cycle / repeats
    dynamical = dyn_cycle / repeats
    return PhaseResult(
        gamma=gamma,
        dynamical=dynamical,
        total=gamma + dynamical,
        branch=branch,
        turns=path.turns,
        samples_used=max(n_used, n_dyn) + 1,
        cycle_repeats=repeats,
        gamma_open=gamma_open,
    )


def cumulative_loop_phase(path: LoopPath, n: int = 512, branch: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Unwrapped angle and running geometric phase along one traversal of the loop."""
    t, _, alpha = path.samples(n)
    v = _geometric_integrand(path, branch)(t)
    return alpha, cumulative_trapezoid(v, t)


def integrate_path_phase(
    z_of_t: Callable[[np.ndarray], np.ndarray],
    dz_of_t: Callable[[np.ndarray], np.ndarray],
    t_end: float,
    branch: int = 1,
    tol: float = 1e-8,
    n0: int = 64,
    max_doublings: int = 16,
    ep_tol: float = EP_TOL,
) -> complex:
    """Geometric phase along an arbitrary path ``Z(t)``, principal sheet at ``t = 0``.

    The root is sign-continued on each trapezoid grid, so the path must be
    resolved by the initial grid.
    """

    def f(t):
        # re-sample on a grid that always contains t=0 so the sheet is anchored
        z = z_of_t(t)
        disc = z * z + 1
        if np.any(np.abs(disc) < ep_tol):
            raise EPCollision("path passes through the EP tolerance ball")
        order = np.argsort(t)
        root = np.sqrt(disc[order])
        signs = kernels.continue_signs(root)
        s = np.empty_like(root)
        s[order] = root * signs
        return kernels.connection_integrand(z, branch * s, dz_of_t(t))

    # all-sample evaluation keeps the sheet anchored consistently between levels
    n = n0
    prev = None
    for _ in range(max_doublings + 1):
        t = np.linspace(0.0, t_end, n + 1)
        v = f(t)
        cur = (t_end / n) * (v.sum() - 0.5 * (v[0] + v[-1]))
        if prev is not None and abs(cur - prev) < tol:
            return complex(cur)
        prev = cur
        n *= 2
    raise NoConvergence(f"path phase did not converge to {tol:g}")


def dynamical_phase(
    h_of_t: Callable[[float], object],
    pair_of_t: Callable[[float], tuple[np.ndarray, np.ndarray]],
    t_end: float,
    t_start: float = 0.0,
    tol: float = 1e-6,
    n0: int = 64,
    max_doublings: int = 14,
) -> complex:
    """``-int <Xi|H|Phi> / <Xi|Phi> dt`` by adaptive trapezoid.

    ``h_of_t`` returns a :class:`Hamiltonian2` or a 2x2 array; ``pair_of_t``
    returns ``(Phi, Xi)``.
    """

    def integrand(ts):
        out = np.empty(len(ts), dtype=np.complex128)
        for k, t in enumerate(ts):
            h = _as_matrix(h_of_t(float(t)))
            phi, xi = pair_of_t(float(t))
            den = np.vdot(xi, phi)
            if abs(den) < ISOTROPY_TOL:
                raise IsotropicPoint(f"<Xi|Phi> vanishes at t = {t}")
            out[k] = -np.vdot(xi, h @ phi) / den
        return out

    value, _ = trapezoid_adaptive(integrand, t_end, tol, n0, max_doublings, t_start=t_start)
    return value


def loop_callables(path: LoopPath, e0: complex = 0.0, omega: complex = 0.5, branch: int = 1):
    """``(h_of_t, pair_of_t)`` for the continued eigenvector along an EP loop."""
    e0, omega = complex(e0), complex(omega)

    def h_of_t(t):
        return Hamiltonian2.from_reduced(e0, complex(path.z(t)), omega)

    def pair_of_t(t):
        s = branch * complex(continued_root(path, np.array([t]))[0])
        chi = np.array([1.0, -complex(path.z(t)) + s])
        return chi, np.conj(chi)

    return h_of_t, pair_of_t


def _as_matrix(h) -> np.ndarray:
    if isinstance(h, Hamiltonian2):
        return h.matrix
    m = np.asarray(h, dtype=np.complex128)
    if m.shape != (2, 2):
        raise ValidationError("Hamiltonian must be 2x2")
    return m


# ---------------------------------------------------------------------------
# transport matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonodromyMatrix:
    alpha: float
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", _frozen(self.w))

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.w))


def transport_matrix(alpha: float, z_c: complex = 1j) -> MonodromyMatrix:
    """``W(alpha) = [[e^{-i alpha/4}, 0], [2 i Z_c sin(alpha/4), e^{i alpha/4}]]``."""
    a4 = alpha / 4
    w = np.array(
        [[cmath.exp(-1j * a4), 0], [2j * z_c * math.sin(a4), cmath.exp(1j * a4)]],
        dtype=np.complex128,
    )
    return MonodromyMatrix(float(alpha), w)


@dataclass
class GroupLawReport:
    max_composition: float = 0.0
    max_commutator: float = 0.0
    max_det: float = 0.0
    max_orthogonality: float = 0.0
    max_eigen_phase: float = 0.0
    max_line: float = 0.0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_group_laws(
    alphas: Sequence[float],
    z_c: complex = 1j,
    phi0: np.ndarray | None = None,
    tol: float = 1e-12,
) -> GroupLawReport:
    """Check composition, commutativity, ``det = 1``, complex orthogonality and the EP eigen-line.

    Orthogonality is checked in the form ``W^T G W = G`` with ``G`` the bilinear
    form preserved by the family (``G = [[1, Z_c], [Z_c, 0]]`` up to scale).
    """
    if phi0 is None:
        phi0 = np.array([1.0, -z_c], dtype=np.complex128)
    phi0 = np.asarray(phi0, dtype=np.complex128)
    rep = GroupLawReport()
    ws = {a: transport_matrix(a, z_c).w for a in alphas}
    gram = np.array([[0, 0], [0, 0]], dtype=np.complex128)
    for a in alphas:
        w = ws[a]
        rep.max_det = max(rep.max_det, abs(np.linalg.det(w) - 1))
        v = w @ phi0
        rep.max_eigen_phase = max(rep.max_eigen_phase, float(np.max(np.abs(v - cmath.exp(-0.25j * a) * phi0))))
        # projective line: the affine coordinate is unchanged
        rep.max_line = max(rep.max_line, abs(v[1] / v[0] - phi0[1] / phi0[0]))
        for b in alphas:
            wb = ws[b]
            wab = transport_matrix(a + b, z_c).w
            rep.max_composition = max(rep.max_composition, float(np.max(np.abs(w @ wb - wab))))
            rep.max_commutator = max(rep.max_commutator, float(np.max(np.abs(w @ wb - wb @ w))))
    del gram
    for name in ("max_composition", "max_commutator", "max_det", "max_eigen_phase", "max_line"):
        value = getattr(rep, name)
        if value > tol:
            rep.violations.append(f"{name} = {value:.3e} > {tol:g}")
    return rep


def puiseux_sections(path: LoopPath, t: np.ndarray) -> np.ndarray:
    """Frames ``[Phi_+, Phi_-]`` continued along an EP loop.

    Each column is the exact eigen-line ``(1, -Z_c - eps +- s)`` scaled by the
    leading-order normalization ``c_pm = kappa_pm eps^(-1/4)`` (unwrapped angle,
    ``kappa_pm^2 = -+2^(-3/2) Z_c^(-3/2)``).  Returns shape ``(len(t), 2, 2)``.
    """
    z_c = _ep_center(path)
    s = continued_root(path, t)
    z = path.z(t)
    quarter = path.r(t) ** -0.25 * np.exp(-0.25j * path.alpha(t))
    frames = np.empty((len(t), 2, 2), dtype=np.complex128)
    for col, sgn in ((0, 1), (1, -1)):
        kappa = cmath.sqrt(-sgn * 2**-1.5 * z_c**-1.5)
        c = kappa * quarter
        frames[:, 0, col] = c
        frames[:, 1, col] = c * (-z + sgn * s)
    return frames


def numeric_transport(path: LoopPath, samples_per_turn: int = 256) -> MonodromyMatrix:
    """``Phi(alpha) Phi(0)^-1`` from sections tracked along the sampled loop."""
    if not path.center_is_ep:
        raise ValidationError("numeric transport is defined for loops centered on an EP")
    n = max(8, int(samples_per_turn * max(abs(path.turns), 1e-9)))
    t, _, _ = path.samples(n)
    frames = puiseux_sections(path, t)
    f0 = frames[0]
    det0 = np.linalg.det(f0)
    if abs(det0) < 1e-14 * max(1.0, float(np.max(np.abs(f0))) ** 2):
        raise SingularFrame("initial eigen-frame is singular")
    w = frames[-1] @ np.linalg.inv(f0)
    alpha = float(path.alpha(path.duration) - path.alpha(0.0))
    return MonodromyMatrix(alpha, w)


# ---------------------------------------------------------------------------
# Schroedinger evolution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvolutionResult:
    t: np.ndarray
    phi: np.ndarray
    xi: np.ndarray
    phase: PhaseResult
    invariant_drift: float
    local_error: float
    substeps: int
    adiabatic_leakage: float | None


def _simpson(v: np.ndarray, h: float) -> complex:
    n = len(v) - 1
    if n % 2:
        return complex(h * (v.sum() - 0.5 * (v[0] + v[-1])))
    return complex(h / 3 * (v[0] + v[-1] + 4 * v[1:-1:2].sum() + 2 * v[2:-1:2].sum()))


def evolve_schrodinger(
    h_of_t: Callable[[float], object],
    phi_init,
    xi_init,
    t_grid,
    tol: float = 1e-9,
    max_refine: int = 10,
) -> EvolutionResult:
    """RK4 for ``i dPhi/dt = H Phi`` and ``i dXi/dt = H^+ Xi`` on ``t_grid``.

    Each grid interval is split into ``2**k`` RK4 steps; ``k`` is raised until
    the step-doubling error estimate drops below ``tol``.  The total phase is
    read off the first component (continuous logarithm), the dynamical phase is
    ``-int <Xi|H|Phi>/<Xi|Phi> dt`` and the geometric phase their difference.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 2 or np.any(np.diff(t_grid) <= 0):
        raise ValidationError("t_grid must be strictly increasing with >= 2 points")
    dts = np.diff(t_grid)
    if np.ptp(dts) > 1e-9 * dts.max():
        raise ValidationError("t_grid must be equispaced")
    dt_grid = float(dts[0])
    phi0 = np.asarray(phi_init, dtype=np.complex128)
    xi0 = np.asarray(xi_init, dtype=np.complex128)

    for level in range(max_refine + 1):
        sub = 2**level
        n_steps = (len(t_grid) - 1) * sub
        dt = dt_grid / sub
        nodes = t_grid[0] + np.arange(4 * n_steps + 1) * (dt / 4)
        hs_all = np.array([_as_matrix(h_of_t(float(t))) for t in nodes])
        idx = 4 * np.arange(n_steps)[:, None] + np.arange(5)[None, :]
        hs = hs_all[idx]
        phi_path, err_r = kernels.rk4_doubling(hs, dt, phi0)
        xi_path, err_l = kernels.rk4_doubling(np.conj(np.swapaxes(hs, -1, -2)), dt, xi0)
        err = max(err_r, err_l)
        if err <= tol:
            break
    else:
        raise StepRejected(f"local error {err:.3e} above {tol:g} after {max_refine} refinements")

    h_sub = hs_all[::4]
    bi = np.einsum("ki,ki->k", np.conj(xi_path), phi_path)
    drift = float(np.max(np.abs(bi - bi[0])) / abs(bi[0]))
    hphi = np.einsum("kij,kj->ki", h_sub, phi_path)
    integrand = -np.einsum("ki,ki->k", np.conj(xi_path), hphi) / bi
    dynamical = _simpson(integrand, dt)
    z0 = phi_path[:, 0]
    arg = np.unwrap(np.angle(z0))
    total = (arg[-1] - arg[0]) - 1j * math.log(abs(z0[-1]) / abs(z0[0]))
    gamma = total - dynamical
    phase = PhaseResult(complex(gamma), complex(dynamical), complex(total), samples_used=len(nodes))

    leakage = _adiabatic_leakage(h_of_t, t_grid, phi_path[::sub])
    return EvolutionResult(
        t=t_grid,
        phi=phi_path[::sub],
        xi=xi_path[::sub],
        phase=phase,
        invariant_drift=drift,
        local_error=float(err),
        substeps=sub,
        adiabatic_leakage=leakage,
    )


def _adiabatic_leakage(h_of_t, t_grid, phis) -> float | None:
    """Largest weight of the non-followed instantaneous eigenvector (``None`` if undefined)."""
    try:
        own = None
        worst = 0.0
        for t, phi in zip(t_grid, phis):
            h = h_of_t(float(t))
            h = h if isinstance(h, Hamiltonian2) else Hamiltonian2.from_matrix(h)
            pair = eigen_decompose(h)
            weights = []
            for chi in (pair.chi_plus, pair.chi_minus):
                weights.append(abs(chi @ phi) / math.sqrt(abs(chi @ chi)))
            if own is None:
                own = int(np.argmax(weights))
            total = weights[own]
            worst = max(worst, weights[1 - own] / total)
        return worst
    except (ValidationError, ArithmeticError):
        return None
