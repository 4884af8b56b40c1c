import cmath
import warnings

import numpy as np
import pytest

from epkit.errors import DegenerateFit, EPCollision, LeadingOrderWarning, ValidationError, ZeroScale
from epkit.jordan import build_root_chain
from epkit.model import Hamiltonian2, eigen_decompose
from epkit.puiseux import (eps_grid, expand_eigenvalues, expand_eigenvectors, fit_scale_factors,
                           inner_product_asymptote, instantaneous_root_scales,
                           verify_convergence_order, _loglog_slope)
from oracles import charpoly_eigenvalues, reduced_matrix

CHAIN = build_root_chain(Hamiltonian2.from_reduced(0, 1j, 0.5))


def test_coefficients():
    exp = expand_eigenvalues(CHAIN)
    assert exp.delta_e == pytest.approx(0.5 + 0.5j)
    assert exp.b1 == pytest.approx(0.5 + 0.5j)
    assert exp.b0 == pytest.approx(-0.5 + 0.5j)
    assert exp.coefficients(-1) == (-exp.b0, -exp.b1)
    assert expand_eigenvectors(CHAIN).b1 == exp.b1


@pytest.mark.parametrize("direction", [0.0, 1.0, np.pi / 2, 2.5])
def test_eigenvalue_slope(direction):
    fit = verify_convergence_order(CHAIN, eps_grid(1e-8, 1e-2, 12, direction))
    assert abs(fit.slope - 1.5) < 0.1


def test_eigenvector_slope():
    fit = verify_convergence_order(CHAIN, eps_grid(1e-8, 1e-2, 12), "eigenvector")
    assert abs(fit.slope - 1.0) < 0.1


def test_prediction_against_charpoly():
    exp = expand_eigenvalues(CHAIN)
    eps = 1e-6
    exact = charpoly_eigenvalues(reduced_matrix(0, 1j + eps, 0.5))
    pred = exp.eigenvalues(eps)
    err = min(abs(pred[0] - exact[0]), abs(pred[0] - exact[1]))
    assert err < 10 * abs(eps) ** 1.5 + 1e-15


def test_line_prediction_order():
    exp = expand_eigenvalues(CHAIN)
    eps = 1e-6
    pair = eigen_decompose(Hamiltonian2.from_reduced(0, 1j + eps, 0.5))
    line = exp.line(eps)
    assert np.allclose(line, exp.truncated_line(eps), atol=1e-12)
    assert abs(line[1] - pair.w_plus) < 10 * eps


def test_validity_warning():
    with pytest.warns(LeadingOrderWarning):
        expand_eigenvalues(CHAIN).eigenvalues(0.1)


def test_inner_product_asymptote_matches_expansion():
    exp = expand_eigenvalues(CHAIN)
    eps = 1e-4
    phi = exp.right_vector(eps)
    xi = exp.left_vector(eps)
    built = np.vdot(xi, phi)
    predicted = inner_product_asymptote(exp, eps)
    assert abs(built - predicted) < 5 * abs(eps)
    fit = fit_scale_factors(CHAIN)
    via_diag = inner_product_asymptote(exp, eps, dc=fit.d_plus * fit.c_plus)
    assert via_diag == pytest.approx(predicted, rel=1e-12)
    assert inner_product_asymptote(exp, eps, -1) == pytest.approx(-predicted)


def test_cross_branch_product_is_higher_order():
    exp = expand_eigenvalues(CHAIN)
    eps = 1e-4
    cross = np.vdot(exp.left_vector(eps, -1), exp.right_vector(eps, 1))
    assert abs(cross) < 10 * eps


def test_scale_fits():
    fit = fit_scale_factors(CHAIN, c0=2, d0=1j)
    assert fit.c_plus == pytest.approx(CHAIN.sigma * CHAIN.q * 2)
    assert fit.d_plus == pytest.approx(CHAIN.sigma.conjugate() * CHAIN.q * CHAIN.z_c * 1j)
    back = fit_scale_factors(CHAIN, "diagonal-primary", c_pm=(fit.c_plus, fit.c_minus),
                             d_pm=(fit.d_plus, fit.d_minus))
    assert back.c0_plus == pytest.approx(2) and back.d0_minus == pytest.approx(1j)
    inst = instantaneous_root_scales(CHAIN, -1)
    assert inst.c0_plus == -1 and inst.d0_plus == -1
    with pytest.raises(ZeroScale):
        fit_scale_factors(CHAIN, c0=0)
    with pytest.raises(ValidationError):
        fit_scale_factors(CHAIN, "diagonal-primary")
    with pytest.raises(ValidationError):
        fit_scale_factors(CHAIN, "sideways")
    with pytest.raises(ValidationError):
        instantaneous_root_scales(CHAIN, 2)


def test_sheet_choice_by_angle():
    exp = expand_eigenvalues(CHAIN)
    eps = cmath.exp(1j * 3.0) * 1e-4
    a = exp.eigenvalues(eps, angle=3.0)
    b = exp.eigenvalues(eps, angle=3.0 + 2 * np.pi)
    assert a[0] == pytest.approx(b[1])


def test_convergence_errors():
    with pytest.raises(EPCollision):
        verify_convergence_order(CHAIN, np.array([1e-12, 1e-3]))
    with pytest.raises(DegenerateFit):
        _loglog_slope(np.array([1e-3, 1e-3]), np.array([1.0, 2.0]))
    with pytest.raises(DegenerateFit):
        _loglog_slope(np.array([1e-3, 1e-4]), np.array([0.0, 2.0]))
    with pytest.raises(ValidationError):
        verify_convergence_order(CHAIN, eps_grid(1e-6, 1e-3, 4), "norm")
    with pytest.raises(ValidationError):
        eps_grid(0, 1, 3)
