import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from epkit.errors import (DegenerateCoupling, EPCollision, ExceptionalInput, IsotropicLine,
                          StepTooLarge, ValidationError, ZeroScale)
from epkit.model import (Hamiltonian2, branch_power, build_hamiltonian, complex_from_json,
                         eigen_decompose, normalize_diagonal_chart, track_branch)
from oracles import charpoly_eigenvalues, set_match_error

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


def generic(h):
    try:
        z = h.z
    except DegenerateCoupling:
        return False
    return abs(z * z + 1) > 1e-6 and abs(h.omega) > 1e-3


def test_hermitian_example_spectrum():
    pair = eigen_decompose(build_hamiltonian(2, 0, 1))
    assert pair.e_plus == pytest.approx(1 + math.sqrt(2))
    assert pair.e_minus == pytest.approx(1 - math.sqrt(2))
    assert abs(pair.chi_plus @ pair.chi_minus) < 1e-15


def test_reduction_round_trip():
    h = build_hamiltonian(1 + 2j, -0.5j, 0.3 - 0.1j)
    back = Hamiltonian2.from_reduced(h.e0, h.z, h.omega)
    assert np.allclose(back.matrix, h.matrix, atol=1e-15)


def test_diagonal_hamiltonian_uses_axes():
    pair = eigen_decompose(build_hamiltonian(3, 1, 0))
    assert (pair.e_plus, pair.e_minus) == (3, 1)
    assert np.array_equal(pair.chi_minus, [0, 1])
    swapped = eigen_decompose(build_hamiltonian(3, 1, 0), branch=-1)
    assert swapped.e_plus == 1


def test_z_needs_coupling():
    with pytest.raises(DegenerateCoupling):
        build_hamiltonian(1, 2, 0).z


def test_ep_input_rejected():
    with pytest.raises(ExceptionalInput):
        eigen_decompose(build_hamiltonian(0.5j, -0.5j, 0.5))


def test_json_round_trip_and_rejections():
    h = Hamiltonian2.from_json({"eps1": [1, 2], "eps2": 0.5, "omega": [0, -1]})
    assert h.eps1 == 1 + 2j and h.eps2 == 0.5 and h.omega == -1j
    assert Hamiltonian2.from_json(h.to_json()) == h
    with pytest.raises(ValidationError):
        Hamiltonian2.from_json({"eps1": 1, "eps2": 1, "omega": 1, "extra": 0})
    with pytest.raises(ValidationError):
        complex_from_json("1+2j")
    with pytest.raises(ValidationError):
        Hamiltonian2.from_matrix([[1, 2], [3, 4]])


@given(cplx, cplx, cplx)
def test_eigenvalues_match_charpoly(e1, e2, om):
    h = build_hamiltonian(e1, e2, om)
    if not generic(h):
        return
    pair = eigen_decompose(h)
    assert set_match_error((pair.e_plus, pair.e_minus), charpoly_eigenvalues(h.matrix)) < 1e-9


@given(cplx, cplx, cplx)
def test_eigenvectors_and_complex_orthogonality(e1, e2, om):
    h = build_hamiltonian(e1, e2, om)
    if not generic(h):
        return
    pair = eigen_decompose(h)
    m = h.matrix
    for e, chi in ((pair.e_plus, pair.chi_plus), (pair.e_minus, pair.chi_minus)):
        scale = max(1.0, np.abs(m).max()) * max(1.0, np.abs(chi).max())
        assert np.abs(m @ chi - e * chi).max() < 1e-9 * scale
    assert pair.w_plus * pair.w_minus == pytest.approx(-1, abs=1e-9)


@given(cplx, cplx, cplx)
def test_instantaneous_normalization_biorthonormal(e1, e2, om):
    h = build_hamiltonian(e1, e2, om)
    if not generic(h):
        return
    pair = normalize_diagonal_chart(eigen_decompose(h))
    table = pair.biorthogonal_table()
    assert np.allclose(table, np.eye(2), atol=1e-8)
    # left vectors are left eigenvectors: Xi^+ H = E Xi^+
    assert np.allclose(np.conj(pair.xi_plus) @ h.matrix, pair.e_plus * np.conj(pair.xi_plus), atol=1e-7 * (1 + abs(pair.e_plus)) * np.abs(pair.xi_plus).max())


def test_gauge_normalization():
    pair = eigen_decompose(build_hamiltonian(1, 0.2j, 0.7))
    norm = normalize_diagonal_chart(pair, instantaneous=False, c_plus=2 - 1j, c_minus=0.5j)
    assert np.allclose(norm.biorthogonal_table(), np.eye(2), atol=1e-13)
    assert norm.c_plus == 2 - 1j
    with pytest.raises(ZeroScale):
        normalize_diagonal_chart(pair, instantaneous=False, c_plus=0, c_minus=1)
    with pytest.raises(ValidationError):
        normalize_diagonal_chart(pair, instantaneous=False)


def test_isotropic_line_rejected():
    from epkit.model import SpectralPair

    pair = SpectralPair(0, 0, (1, 1j), (1, -1j))
    with pytest.raises(IsotropicLine):
        normalize_diagonal_chart(pair)


def test_branch_power_continuation():
    assert branch_power(-1, 0.5) == pytest.approx(1j)
    assert branch_power(-1, 0.5, angle=-math.pi) == pytest.approx(-1j)
    assert branch_power(1, 0.25, angle=2 * math.pi) == pytest.approx(1j)
    assert branch_power(0, 0.5) == 0


def test_tracking_around_ep_swaps_sheets():
    alphas = np.linspace(0, 2 * math.pi, 400)
    path = [Hamiltonian2.from_reduced(0, 1j + 0.1 * cmath.exp(1j * a), 0.5) for a in alphas]
    tracked = track_branch(path)
    assert tracked[-1].e_plus == pytest.approx(tracked[0].e_minus, abs=1e-12)
    twice = track_branch(path + path[1:])
    assert twice[-1].e_plus == pytest.approx(twice[0].e_plus, abs=1e-12)


def test_tracking_errors():
    with pytest.raises(EPCollision):
        track_branch([Hamiltonian2.from_reduced(0, 1j, 1)])
    with pytest.raises(StepTooLarge):
        track_branch([Hamiltonian2.from_reduced(0, z, 1) for z in (0, 3, -3)], step_bound=0.1)
    assert track_branch([]) == []
