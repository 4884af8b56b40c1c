"""Phase rigidity ``r = |Phi^T Phi| / <Phi|Phi>`` and landscape scans over parameter grids."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import EPCollision, InvalidBinding, NotNormalized, ValidationError
from .model import EP_TOL, Hamiltonian2, eigen_decompose, normalize_diagonal_chart

FIELDS = ("eps1.re", "eps1.im", "eps2.re", "eps2.im", "omega.re", "omega.im")
CSV_HEADER = ("x", "y", "ReEp", "ImEp", "ReEm", "ImEm", "r", "ep_flag")


@dataclass(frozen=True)
class RigidityResult:
    r: float
    real_norm: float
    imag_norm: float
    cross: float
    norm_sq: float

    @property
    def beta(self) -> float:
        """Hyperbolic angle with ``cosh^2 beta = Phi_r^T Phi_r`` and ``sinh^2 beta = Phi_i^T Phi_i``."""
        return math.asinh(math.sqrt(max(self.imag_norm, 0.0)))


def phase_rigidity(phi, tol: float = 1e-8) -> RigidityResult:
    """Rigidity of a state normalized as ``Phi^T Phi = 1``.

    The real and imaginary parts satisfy ``Phi_r^T Phi_r - Phi_i^T Phi_i = 1``
    and ``Phi_r^T Phi_i = 0``, so ``||Phi||^2 = 1 + 2 Phi_i^T Phi_i >= 1``.
    """
    phi = np.asarray(phi, dtype=np.complex128).reshape(2)
    binorm = complex(phi @ phi)
    if not math.isfinite(abs(binorm)) or abs(binorm - 1) > tol:
        raise NotNormalized(f"Phi^T Phi = {binorm}, expected 1")
    re, im = phi.real, phi.imag
    norm_sq = float(np.vdot(phi, phi).real)
    return RigidityResult(
        r=abs(binorm) / norm_sq,
        real_norm=float(re @ re),
        imag_norm=float(im @ im),
        cross=float(re @ im),
        norm_sq=norm_sq,
    )


def rigidity_of_line(chi, iso_tol: float = 1e-12) -> RigidityResult:
    """Normalize ``chi`` in the instantaneous picture, then compute the rigidity."""
    chi = np.asarray(chi, dtype=np.complex128).reshape(2)
    binorm = complex(chi @ chi)
    scale = float(np.vdot(chi, chi).real)
    if scale == 0 or abs(binorm) < iso_tol * scale:
        raise NotNormalized("isotropic line: Phi^T Phi = 1 cannot be imposed")
    return phase_rigidity(chi / np.sqrt(binorm))


@dataclass(frozen=True)
class AsymptoteCheck:
    eps: np.ndarray
    r: np.ndarray
    deviation: np.ndarray

    @property
    def max_deviation(self) -> float:
        return float(np.max(self.deviation))

    @property
    def monotone(self) -> bool:
        """Deviation shrinks as ``|eps|`` decreases."""
        order = np.argsort(-np.abs(self.eps))
        return bool(np.all(np.diff(self.deviation[order]) <= 0))


def rigidity_asymptote_check(
    eps_grid, z_c: complex = 1j, omega: complex = 1.0, branch: int = 1, ep_tol: float = EP_TOL
) -> AsymptoteCheck:
    """``|r(eps) / |2 eps|^(1/2) - 1|`` with ``r`` from the exact normalized eigenvector."""
    eps = np.atleast_1d(np.asarray(eps_grid, dtype=np.complex128))
    r = np.empty(len(eps))
    for k, e in enumerate(eps):
        z = z_c + e
        if abs(z * z + 1) < ep_tol:
            raise EPCollision(f"eps = {e} inside the EP tolerance ball")
        h = Hamiltonian2.from_reduced(0.0, z, omega)
        pair = normalize_diagonal_chart(eigen_decompose(h))
        phi = pair.phi_plus if branch == 1 else pair.phi_minus
        r[k] = phase_rigidity(phi).r
    deviation = np.abs(r / np.sqrt(np.abs(2 * eps)) - 1)
    return AsymptoteCheck(eps, r, deviation)


# ---------------------------------------------------------------------------
# landscapes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Axis:
    field: str
    start: float
    stop: float
    n: int

    def __post_init__(self):
        if self.field not in FIELDS:
            raise InvalidBinding(f"unknown field {self.field!r}; choose from {', '.join(FIELDS)}")
        if self.n < 1:
            raise ValidationError("axis needs n >= 1")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.n)


@dataclass(frozen=True)
class ScanSpec:
    base: Hamiltonian2
    x_axis: Axis
    y_axis: Axis
    ep_tol: float = EP_TOL

    def __post_init__(self):
        if self.x_axis.field == self.y_axis.field:
            raise InvalidBinding("both axes bound to the same field")
        if not self.ep_tol > 0:
            raise ValidationError("ep_tol must be positive")


@dataclass
class RigidityGrid:
    x: np.ndarray
    y: np.ndarray
    e_plus: np.ndarray
    e_minus: np.ndarray
    r_plus: np.ndarray
    r_minus: np.ndarray
    ep_flag: np.ndarray
    fields: tuple[str, str] = field(default=("", ""))

    def to_csv(self, branch: int = 1) -> str:
        from .io import csv_text

        r = self.r_plus if branch == 1 else self.r_minus
        rows = []
        for j, y in enumerate(self.y):
            for i, x in enumerate(self.x):
                ep, em = self.e_plus[j, i], self.e_minus[j, i]
                flag = int(self.ep_flag[j, i] == kernels.FLAG_EP)
                rows.append((x, y, ep.real, ep.imag, em.real, em.imag, r[j, i], flag))
        return csv_text(CSV_HEADER, rows)


def _row_params(spec: ScanSpec, y: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    xs = spec.x_axis.values
    n = len(xs)
    parts = {
        "eps1": [np.full(n, spec.base.eps1.real), np.full(n, spec.base.eps1.imag)],
        "eps2": [np.full(n, spec.base.eps2.real), np.full(n, spec.base.eps2.imag)],
        "omega": [np.full(n, spec.base.omega.real), np.full(n, spec.base.omega.imag)],
    }
    for name, value in ((spec.x_axis.field, xs), (spec.y_axis.field, y)):
        key, comp = name.split(".")
        parts[key][0 if comp == "re" else 1][:] = value
    return tuple(p[0] + 1j * p[1] for p in (parts["eps1"], parts["eps2"], parts["omega"]))


def scan_landscape(spec: ScanSpec, threads: int = 1) -> RigidityGrid:
    """Evaluate spectrum and rigidity on every grid cell.

    Rows are independent tasks written into preallocated arrays by index, so
    the result does not depend on ``threads``.
    """
    if threads < 1:
        raise ValidationError("threads must be >= 1")
    xs, ys = spec.x_axis.values, spec.y_axis.values
    shape = (len(ys), len(xs))
    e_plus = np.empty(shape, dtype=np.complex128)
    e_minus = np.empty(shape, dtype=np.complex128)
    r_plus = np.empty(shape)
    r_minus = np.empty(shape)
    flag = np.empty(shape, dtype=np.int64)

    def row(j):
        eps1, eps2, omega = _row_params(spec, ys[j])
        ep, em, rp, rm, fl = kernels.landscape(eps1, eps2, omega, spec.ep_tol)
        e_plus[j], e_minus[j], r_plus[j], r_minus[j], flag[j] = ep, em, rp, rm, fl

    if threads == 1:
        for j in range(len(ys)):
            row(j)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(row, range(len(ys))))
    return RigidityGrid(xs, ys, e_plus, e_minus, r_plus, r_minus, flag,
                        (spec.x_axis.field, spec.y_axis.field))
