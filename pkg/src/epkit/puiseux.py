"""Leading-order fractional-power expansions around an EP.

Near ``Z = Z_c + eps`` the eigen-data behave like

    E_pm   = E0 +- eps^(1/2) dE,                dE = omega sqrt(2 Z_c)
    Phi_pm = Phi0 + eps^(1/2) (b0 Phi0 + b1 Phi1),  b1 = +-dE,  b0 = +-Z_c dE / (2 omega)

with ``eps^(1/2)`` on the principal sheet unless an unwrapped angle is given.
"""

from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateFit, EPCollision, LeadingOrderWarning, ValidationError, ZeroScale
from .jordan import RootChain
from .model import EP_TOL, Hamiltonian2, branch_power, eigen_decompose

VALIDITY_BOUND = 1e-2


def _check_validity(eps: complex) -> None:
    if abs(eps) > VALIDITY_BOUND:
        warnings.warn(
            f"|eps| = {abs(eps):.3g} exceeds {VALIDITY_BOUND:g}; leading-order expansion only",
            LeadingOrderWarning,
            stacklevel=3,
        )


@dataclass(frozen=True)
class PuiseuxExpansion:
    chain: RootChain
    delta_e: complex
    b0: complex
    b1: complex
    mode: str = "root-primary"

    def coefficients(self, branch: int) -> tuple[complex, complex]:
        """``(b0, b1)`` on the requested branch (the stored values are the ``+`` branch)."""
        return branch * self.b0, branch * self.b1

    def sqrt_eps(self, eps: complex, angle: float | None = None) -> complex:
        return branch_power(eps, 0.5, angle)

    def eigenvalues(self, eps: complex, angle: float | None = None) -> tuple[complex, complex]:
        _check_validity(eps)
        u = self.sqrt_eps(eps, angle)
        e0 = self.chain.e0
        return e0 + u * self.delta_e, e0 - u * self.delta_e

    def right_vector(self, eps: complex, branch: int = 1, angle: float | None = None) -> np.ndarray:
        _check_validity(eps)
        b0, b1 = self.coefficients(branch)
        u = self.sqrt_eps(eps, angle)
        c = self.chain
        return c.phi0 + u * (b0 * c.phi0 + b1 * c.phi1)

    def left_vector_conj(
        self, eps: complex, branch: int = 1, angle: float | None = None
    ) -> np.ndarray:
        """``conj(Xi_pm)`` built from the conjugated left chain."""
        _check_validity(eps)
        b0, b1 = self.coefficients(branch)
        u = self.sqrt_eps(eps, angle)
        c = self.chain
        x0, x1 = np.conj(c.xi0), np.conj(c.xi1)
        return x0 + u * (b0 * x0 + b1 * x1)

    def left_vector(self, eps: complex, branch: int = 1, angle: float | None = None) -> np.ndarray:
        return np.conj(self.left_vector_conj(eps, branch, angle))

    def line(self, eps: complex, branch: int = 1, angle: float | None = None) -> np.ndarray:
        """Affine representative ``(1, w)`` of the predicted right eigen-line."""
        v = self.right_vector(eps, branch, angle)
        return v / v[0]

    def truncated_line(self, eps: complex, branch: int = 1, angle: float | None = None) -> np.ndarray:
        """``chi_0 +- eps^(1/2) (0, sqrt(2 Z_c))``: the line expansion written directly."""
        _check_validity(eps)
        u = self.sqrt_eps(eps, angle)
        z_c = self.chain.z_c
        return np.array([1.0, -z_c + branch * u * cmath.sqrt(2 * z_c)], dtype=np.complex128)


def expand_eigenvalues(chain: RootChain, omega: complex | None = None) -> PuiseuxExpansion:
    omega = chain.omega if omega is None else complex(omega)
    delta_e = omega * cmath.sqrt(2 * chain.z_c)
    b1 = delta_e
    b0 = chain.z_c * delta_e / (2 * omega)
    return PuiseuxExpansion(chain, delta_e, b0, b1)


def expand_eigenvectors(chain: RootChain, omega: complex | None = None) -> PuiseuxExpansion:
    # same coefficients; kept as a separate entry point for the vector use-case
    return expand_eigenvalues(chain, omega)


@dataclass(frozen=True)
class ScaleFit:
    """Scale factors of the diagonal chart matched to those of the root chart."""

    mode: str
    c_plus: complex
    c_minus: complex
    d_plus: complex
    d_minus: complex
    c0_plus: complex
    c0_minus: complex
    d0_plus: complex
    d0_minus: complex


def fit_scale_factors(
    chain: RootChain,
    mode: str = "root-primary",
    c0: complex | None = None,
    d0: complex | None = None,
    c_pm: tuple[complex, complex] | None = None,
    d_pm: tuple[complex, complex] | None = None,
) -> ScaleFit:
    """Match fiber scales between the root chart and the diagonal chart.

    ``root-primary``: one root scale ``c0`` (``d0``) is given and
    ``c_pm = sigma q c0``, ``d_pm = conj(sigma) q Z_c d0``.
    ``diagonal-primary``: ``c_pm`` (``d_pm``) are given and the root scale is
    fitted separately on each branch.
    """
    sigma, q, z_c = chain.sigma, chain.q, chain.z_c
    right = sigma * q
    left = sigma.conjugate() * q * z_c
    if mode == "root-primary":
        c0 = chain.c0 if c0 is None else complex(c0)
        d0 = chain.d0 if d0 is None else complex(d0)
        if c0 == 0 or d0 == 0:
            raise ZeroScale("root scales must be nonzero")
        c, d = right * c0, left * d0
        return ScaleFit(mode, c, c, d, d, c0, c0, d0, d0)
    if mode == "diagonal-primary":
        if c_pm is None or d_pm is None:
            raise ValidationError("diagonal-primary mode needs c_pm and d_pm")
        cp, cm = (complex(x) for x in c_pm)
        dp, dm = (complex(x) for x in d_pm)
        if 0 in (cp, cm, dp, dm):
            raise ZeroScale("diagonal scales must be nonzero")
        return ScaleFit(mode, cp, cm, dp, dm, cp / right, cm / right, dp / left, dm / left)
    raise ValidationError(f"unknown mode {mode!r}")


def instantaneous_root_scales(chain: RootChain, kappa: int = 1) -> ScaleFit:
    """Root normalization with ``c_pm = d_pm`` and ``d0 c0 = 1``: ``c0 = d0 = kappa``."""
    if kappa not in (1, -1):
        raise ValidationError("kappa must be +1 or -1")
    return fit_scale_factors(chain, "root-primary", c0=kappa, d0=kappa)


def inner_product_asymptote(
    expansion: PuiseuxExpansion,
    eps: complex,
    branch: int = 1,
    d0c0: complex | None = None,
    dc: complex | None = None,
    angle: float | None = None,
) -> complex:
    """Leading behavior of ``<Xi_pm|Phi_pm>``.

    Either the root product ``d0 c0`` (default: the chain's own) or the
    diagonal product ``d_pm c_pm`` can be supplied.
    """
    _check_validity(eps)
    _, b1 = expansion.coefficients(branch)
    u = branch_power(eps, 0.5, angle)
    if dc is not None:
        c = expansion.chain
        return 2 * b1 / (c.omega * c.z_c) * complex(dc) * u
    if d0c0 is None:
        d0c0 = expansion.chain.d0 * expansion.chain.c0
    return 2 * b1 * complex(d0c0) * u


@dataclass(frozen=True)
class ConvergenceFit:
    quantity: str
    eps: np.ndarray
    exact: np.ndarray
    predicted: np.ndarray
    errors: np.ndarray
    slope: float
    intercept: float


def eps_grid(start: float, stop: float, n: int, direction: float = 0.0) -> np.ndarray:
    """Log-spaced ``|eps|`` from ``start`` to ``stop`` along the ray ``arg eps = direction``."""
    if n < 1 or start <= 0 or stop <= 0:
        raise ValidationError("eps grid needs n >= 1 and positive endpoints")
    return np.logspace(np.log10(start), np.log10(stop), n) * np.exp(1j * direction)


def _loglog_slope(eps: np.ndarray, errors: np.ndarray) -> tuple[float, float]:
    x = np.log(np.abs(eps))
    if x.size < 2 or np.ptp(x) == 0:
        raise DegenerateFit("slope needs at least two distinct |eps| values")
    if np.any(errors <= 0):
        raise DegenerateFit("remainder vanished at some grid point; slope undefined")
    y = np.log(errors)
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def verify_convergence_order(
    chain: RootChain,
    eps: np.ndarray,
    quantity: str = "eigenvalue",
    ep_tol: float = EP_TOL,
) -> ConvergenceFit:
    """Fit the log-log slope of the remainder ``|exact - predicted|`` over an eps grid.

    The exact data come from the closed-form decomposition (batched kernel)
    of ``H(Z_c + eps)``; each prediction is matched to the nearest exact
    eigenvalue, so the test does not rely on the expansion's branch choice.
    """
    eps = np.atleast_1d(np.asarray(eps, dtype=np.complex128))
    z = chain.z_c + eps
    if np.any(np.abs(z * z + 1) < ep_tol):
        raise EPCollision("eps grid reaches into the EP tolerance ball")
    expansion = expand_eigenvalues(chain)
    omega, e0 = chain.omega, chain.e0
    eps1 = e0 + omega * z
    eps2 = e0 - omega * z
    e_plus, e_minus, w_plus, w_minus, _ = kernels.eig2_batch(eps1, eps2, omega, ep_tol)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LeadingOrderWarning)
        if quantity == "eigenvalue":
            pred = np.array([expansion.eigenvalues(e)[0] for e in eps])
            pick_minus = np.abs(e_minus - pred) < np.abs(e_plus - pred)
            exact = np.where(pick_minus, e_minus, e_plus)
        elif quantity == "eigenvector":
            pred = np.array([expansion.line(e)[1] for e in eps])
            pick_minus = np.abs(w_minus - pred) < np.abs(w_plus - pred)
            exact = np.where(pick_minus, w_minus, w_plus)
        else:
            raise ValidationError(f"unknown quantity {quantity!r}")
    errors = np.abs(exact - pred)
    slope, intercept = _loglog_slope(eps, errors)
    return ConvergenceFit(quantity, eps, exact, pred, errors, slope, intercept)


def exact_eigenvalues_near(chain: RootChain, eps: complex) -> tuple[complex, complex]:
    h = Hamiltonian2.from_reduced(chain.e0, chain.z_c + eps, chain.omega)
    pair = eigen_decompose(h)
    return pair.e_plus, pair.e_minus
