"""Complex symmetric 2x2 Hamiltonian and its bi-orthogonal eigen-data.

The Hamiltonian ``[[eps1, omega], [omega, eps2]]`` is reduced to
``E0 * I + omega * [[Z, 1], [1, -Z]]`` with ``E0 = (eps1 + eps2)/2`` and
``Z = (eps1 - eps2)/(2 omega)``.  Eigen-lines are stored as affine
representatives ``chi = (1, w)`` and the scale factors (``c`` for right,
``d`` for left vectors) are kept separately; right vectors are ``c * chi``
and left vectors ``conj(d) * conj(chi)``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import (
    DegenerateCoupling,
    EPCollision,
    ExceptionalInput,
    IsotropicLine,
    StepTooLarge,
    ValidationError,
    ZeroScale,
)

EP_TOL = 1e-9
ISOTROPY_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


def complex_from_json(value) -> complex:
    """Decode a complex number serialized as ``[re, im]`` (a bare real is accepted)."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(float(value), 0.0)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(float(value[0]), float(value[1]))
    raise ValidationError(f"expected a complex number as [re, im], got {value!r}")


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def branch_power(eps: complex, power: float, angle: float | None = None) -> complex:
    """``eps**power`` on the sheet fixed by ``angle``.

    With ``angle=None`` the principal branch is used.  Passing the unwrapped
    polar angle of ``eps`` (e.g. from a loop path) continues the power across
    the negative real axis.
    """
    eps = complex(eps)
    if eps == 0:
        return 0j
    if angle is None:
        return eps**power if power >= 0 else 1.0 / eps ** (-power)
    r = abs(eps)
    return r**power * cmath.exp(1j * power * angle)


@dataclass(frozen=True)
class Hamiltonian2:
    eps1: complex
    eps2: complex
    omega: complex

    def __post_init__(self):
        for name in ("eps1", "eps2", "omega"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @classmethod
    def from_reduced(cls, e0: complex, z: complex, omega: complex) -> "Hamiltonian2":
        """Build from ``(E0, Z, omega)``: ``eps1,2 = E0 +- omega Z``."""
        e0, z, omega = complex(e0), complex(z), complex(omega)
        return cls(e0 + omega * z, e0 - omega * z, omega)

    @classmethod
    def from_matrix(cls, m) -> "Hamiltonian2":
        m = np.asarray(m, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValidationError(f"expected a 2x2 matrix, got shape {m.shape}")
        if m[0, 1] != m[1, 0]:
            raise ValidationError("matrix is not complex symmetric")
        return cls(m[0, 0], m[1, 1], m[0, 1])

    @classmethod
    def from_json(cls, data: dict) -> "Hamiltonian2":
        missing = {"eps1", "eps2", "omega"} - set(data)
        if missing:
            raise ValidationError(f"hamiltonian is missing {sorted(missing)}")
        extra = set(data) - {"eps1", "eps2", "omega"}
        if extra:
            raise ValidationError(f"unknown hamiltonian keys {sorted(extra)}")
        return cls(*(complex_from_json(data[k]) for k in ("eps1", "eps2", "omega")))

    def to_json(self) -> dict:
        return {k: complex_to_json(getattr(self, k)) for k in ("eps1", "eps2", "omega")}

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.eps1, self.omega], [self.omega, self.eps2]], dtype=np.complex128
        )

    @property
    def e0(self) -> complex:
        return 0.5 * (self.eps1 + self.eps2)

    @property
    def is_diagonal(self) -> bool:
        return self.omega == 0

    @property
    def z(self) -> complex:
        if self.omega == 0:
            raise DegenerateCoupling("Z is undefined for omega = 0")
        return (self.eps1 - self.eps2) / (2.0 * self.omega)

    @property
    def is_hermitian(self) -> bool:
        return self.eps1.imag == 0 and self.eps2.imag == 0 and self.omega.imag == 0


def build_hamiltonian(eps1: complex, eps2: complex, omega: complex) -> Hamiltonian2:
    return Hamiltonian2(eps1, eps2, omega)


@dataclass(frozen=True)
class SpectralPair:
    """Right/left eigen-data of a :class:`Hamiltonian2`.

    ``branch`` is the sign applied to the principal root of ``Z**2 + 1``.
    Scale factors are ``None`` until a normalization is imposed.
    """

    e_plus: complex
    e_minus: complex
    chi_plus: np.ndarray
    chi_minus: np.ndarray
    branch: int = 1
    c_plus: complex | None = None
    c_minus: complex | None = None
    d_plus: complex | None = None
    d_minus: complex | None = None
    hamiltonian: Hamiltonian2 | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "chi_plus", _frozen(self.chi_plus))
        object.__setattr__(self, "chi_minus", _frozen(self.chi_minus))

    @property
    def w_plus(self) -> complex:
        return complex(self.chi_plus[1] / self.chi_plus[0])

    @property
    def w_minus(self) -> complex:
        return complex(self.chi_minus[1] / self.chi_minus[0])

    @property
    def is_normalized(self) -> bool:
        return None not in (self.c_plus, self.c_minus, self.d_plus, self.d_minus)

    def _scales(self):
        if not self.is_normalized:
            raise ValueError("scale factors unset; call normalize_diagonal_chart first")
        return self.c_plus, self.c_minus, self.d_plus, self.d_minus

    @property
    def phi_plus(self) -> np.ndarray:
        return self._scales()[0] * self.chi_plus

    @property
    def phi_minus(self) -> np.ndarray:
        return self._scales()[1] * self.chi_minus

    @property
    def xi_plus(self) -> np.ndarray:
        return np.conj(self._scales()[2]) * np.conj(self.chi_plus)

    @property
    def xi_minus(self) -> np.ndarray:
        return np.conj(self._scales()[3]) * np.conj(self.chi_minus)

    def biorthogonal_table(self) -> np.ndarray:
        """Matrix ``<Xi_k|Phi_l>`` with ``k, l`` ordered (+, -)."""
        xis = (self.xi_plus, self.xi_minus)
        phis = (self.phi_plus, self.phi_minus)
        return np.array([[np.vdot(x, p) for p in phis] for x in xis])

    def swapped(self) -> "SpectralPair":
        """Same data with the roles of the two sheets exchanged."""
        return SpectralPair(
            self.e_minus,
            self.e_plus,
            self.chi_minus,
            self.chi_plus,
            -self.branch,
            self.c_minus,
            self.c_plus,
            self.d_minus,
            self.d_plus,
            self.hamiltonian,
        )


def affine_roots(z: complex, s: complex) -> tuple[complex, complex]:
    """``(-Z + s, -Z - s)`` computed without cancellation (their product is -1)."""
    a = -z + s
    b = -z - s
    if abs(a) < abs(b):
        a = -1.0 / b
    else:
        b = -1.0 / a
    return a, b


def eigen_decompose(h: Hamiltonian2, branch: int = 1, ep_tol: float = EP_TOL) -> SpectralPair:
    """Closed-form eigen-decomposition ``E = E0 +- omega sqrt(Z^2+1)``.

    ``branch=-1`` swaps the sheet of the square root.  For ``omega = 0`` the
    eigenvectors are the coordinate axes and ``chi_minus = (0, 1)``.
    """
    if branch not in (1, -1):
        raise ValidationError("branch must be +1 or -1")
    if h.is_diagonal:
        pair = (h.eps1, h.eps2, (1, 0), (0, 1))
        if branch == -1:
            pair = (h.eps2, h.eps1, (0, 1), (1, 0))
        return SpectralPair(*pair, branch=branch, hamiltonian=h)
    z = h.z
    disc = z * z + 1.0
    if abs(disc) < ep_tol:
        raise ExceptionalInput(
            f"Z = {z} is an exceptional point within tolerance (|Z^2+1| = {abs(disc):.3e})"
        )
    s = branch * cmath.sqrt(disc)
    return _pair_from_root(h, z, s, branch)


def _pair_from_root(h: Hamiltonian2, z: complex, s: complex, branch: int) -> SpectralPair:
    wp, wm = affine_roots(z, s)
    return SpectralPair(
        h.e0 + h.omega * s,
        h.e0 - h.omega * s,
        (1.0, wp),
        (1.0, wm),
        branch=branch,
        hamiltonian=h,
    )


def normalize_diagonal_chart(
    pair: SpectralPair,
    instantaneous: bool = True,
    c_plus: complex | None = None,
    c_minus: complex | None = None,
    iso_tol: float = ISOTROPY_TOL,
) -> SpectralPair:
    """Impose ``d c chi^T chi = 1`` on both branches.

    With ``instantaneous=True`` the left scale equals the right one and
    ``c = (chi^T chi)^(-1/2)`` (principal root).  Otherwise the right scales
    are caller-provided gauge inputs and ``d = 1 / (c chi^T chi)``.
    """
    scales = {}
    for tag, chi, c in (("plus", pair.chi_plus, c_plus), ("minus", pair.chi_minus, c_minus)):
        binorm = complex(chi @ chi)
        if abs(binorm) < iso_tol * float(np.vdot(chi, chi).real):
            raise IsotropicLine(f"chi_{tag} is isotropic (chi^T chi = {binorm})")
        if instantaneous:
            c = 1.0 / cmath.sqrt(binorm)
            d = c
        else:
            if c is None:
                raise ValidationError("non-instantaneous normalization needs c_plus and c_minus")
            c = complex(c)
            if c == 0:
                raise ZeroScale(f"c_{tag} must be nonzero")
            d = 1.0 / (c * binorm)
        scales[tag] = (c, d)
    return SpectralPair(
        pair.e_plus,
        pair.e_minus,
        pair.chi_plus,
        pair.chi_minus,
        pair.branch,
        scales["plus"][0],
        scales["minus"][0],
        scales["plus"][1],
        scales["minus"][1],
        pair.hamiltonian,
    )


def track_branch(
    path: Sequence[Hamiltonian2] | Iterable[Hamiltonian2],
    step_bound: float = 0.25,
    ep_tol: float = EP_TOL,
) -> list[SpectralPair]:
    """Continue the eigen-data along a discrete path of Hamiltonians.

    The first point uses the principal branch; afterwards the sign of the
    square root is chosen so that ``chi_plus`` moves least (in the affine
    representative ``(1, w)``).  Raises ``StepTooLarge`` when even the better choice
    jumps by more than ``step_bound``.
    """
    path = list(path)
    if not path:
        return []
    zs = np.empty(len(path), dtype=np.complex128)
    for k, h in enumerate(path):
        z = h.z
        if abs(z * z + 1.0) < ep_tol:
            raise EPCollision(f"path point {k} (Z = {z}) lies inside the EP tolerance ball")
        zs[k] = z
    roots = np.sqrt(zs * zs + 1.0)
    signs = kernels.continue_affine(zs, roots)
    out = []
    for k, h in enumerate(path):
        sgn = int(signs[k])
        pair = _pair_from_root(h, complex(zs[k]), sgn * complex(roots[k]), sgn)
        if out:
            prev = out[-1]
            jump = float(np.max(np.abs(pair.chi_plus - prev.chi_plus)))
            if jump > step_bound:
                raise StepTooLarge(
                    f"branch jump {jump:.3e} between points {k - 1} and {k} exceeds {step_bound}"
                )
        out.append(pair)
    return out
