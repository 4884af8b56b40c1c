import cmath
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import assume, given
from hypothesis import strategies as st

from epkit.errors import ValidationError, ZeroVector
from epkit.model import Hamiltonian2, eigen_decompose, normalize_diagonal_chart
from epkit.projective import (ProjectivePoint, TrajectorySegment, conic_residual, embed, from_line,
                              instantaneous_asymptotics, on_conic, phase_jump_profile, select_chart,
                              step_limit)

finite = st.floats(-5, 5, allow_nan=False)
cplx = st.builds(complex, finite, finite)


@given(cplx, cplx, cplx)
def test_embedding_is_scale_invariant(z0, z1, lam):
    assume(abs(z0) > 1e-3 and abs(lam) > 1e-3)
    p = embed([z0, z1])
    q = embed([lam * z0, lam * z1])
    # the line part is projective, the third coordinate tracks the scale
    assert np.allclose(p.line, q.line)
    assert q.u2 == pytest.approx(p.u2 / lam)
    assert p.scaled(lam).same_point(p)


@given(cplx, cplx)
def test_normalized_states_lie_on_conic(z1, a):
    chi = np.array([1.0, z1])
    binorm = chi @ chi
    assume(abs(binorm) > 1e-3)
    phi = chi / np.sqrt(binorm)
    p = embed(phi)
    assert abs(conic_residual(p)) < 1e-9 * max(1, abs(p.u2) ** 2)
    assert on_conic(p, tol=1e-9)


def test_eigenstate_embedding_and_charts():
    pair = normalize_diagonal_chart(eigen_decompose(Hamiltonian2.from_reduced(0, 1.0, 1.0)))
    p = embed(pair.phi_plus)
    assert p.chart == "U2"
    assert abs(conic_residual(p)) < 1e-14
    assert on_conic(embed([1, 0]))


def test_chart_selection_near_ep():
    assert select_chart(ProjectivePoint([1, -1j, 1e-9])) == "U0"
    assert select_chart(ProjectivePoint([1e-3, 1, 0])) == "U1"
    assert select_chart(ProjectivePoint([1, 1, 1])) == "U2"
    assert np.allclose(ProjectivePoint([2, 4, 6]).affine("U0"), [2, 3])
    with pytest.raises(ValidationError):
        ProjectivePoint([0, 1, 1]).affine("U0")


def test_zero_vector():
    with pytest.raises(ZeroVector):
        embed([0, 0])
    with pytest.raises(ZeroVector):
        ProjectivePoint([0, 0, 0])
    assert embed([0, 2]).u0 == 0


def test_ep_point_exactly_on_conic_symbolic():
    u = sp.Matrix([1, -sp.I, 0])
    assert sp.simplify(u[0] ** 2 + u[1] ** 2 - u[2] ** 2) == 0
    assert conic_residual(from_line([1, -1j])) == 0
    assert conic_residual(from_line([1, 1j])) == 0


def test_approach_to_ep_point():
    z_c = 1j
    pts = []
    for e in (1e-2, 1e-4, 1e-6):
        pair = normalize_diagonal_chart(eigen_decompose(Hamiltonian2.from_reduced(0, z_c + e, 1.0)))
        pts.append(embed(pair.phi_plus).normalized())
    target = np.array([1, -z_c, 0])
    dists = [np.linalg.norm(p / p[0] - target) for p in pts]
    assert dists[0] > dists[1] > dists[2]


@pytest.mark.parametrize("eps", [1e-6, 1e-6j, -1e-6 + 1e-6j])
def test_asymptotic_scales(eps):
    a = instantaneous_asymptotics(eps)
    assert a.norm_sq_plus / a.norm_sq_asymptote == pytest.approx(1, abs=1e-3)
    assert a.norm_sq_minus / a.norm_sq_asymptote == pytest.approx(1, abs=1e-3)
    assert abs(a.exact_ratio + 1) < 1e-2
    assert abs(abs(a.relative_phase) - 1) < 1e-2
    assert abs(a.exact_c_plus_sq / a.c_plus_sq - 1) < 1e-2


def test_asymptotic_ratio_converges():
    devs = [abs(instantaneous_asymptotics(e).exact_ratio + 1) for e in (1e-4, 1e-6, 1e-8)]
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 1e-3


def test_asymptotics_validation():
    with pytest.raises(ValidationError):
        instantaneous_asymptotics(0)
    with pytest.raises(ValidationError):
        instantaneous_asymptotics(1e-3, z_c=2)


class TestJump:
    def test_profile_is_odd_and_bounded(self):
        prof = phase_jump_profile(TrajectorySegment(1e-3, 0.3, (-0.1, 0.1)), 201)
        assert np.allclose(prof.theta, -prof.theta[::-1], atol=1e-15)
        assert np.all(np.abs(prof.theta) < math.pi / 8)
        assert np.all(np.diff(prof.theta) > 0)
        assert np.allclose(np.abs(prof.phase_factor), 1)

    def test_swing_tends_to_quarter_pi(self):
        swings = [phase_jump_profile(TrajectorySegment(rho), 401).swing for rho in (1e-2, 1e-4, 1e-6)]
        errs = [abs(s - math.pi / 4) for s in swings]
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 1e-4

    def test_step_limit(self):
        assert list(step_limit([-1.0, 0.0, 2.0])) == [-math.pi / 8, 0.0, math.pi / 8]
        prof = phase_jump_profile(TrajectorySegment(1e-8), 11)
        mask = prof.s != 0
        assert np.allclose(prof.theta[mask], step_limit(prof.s[mask]), atol=1e-5)

    def test_phase_factor_matches_quarter_root(self):
        seg = TrajectorySegment(0.01, 0.7)
        prof = phase_jump_profile(seg, 5)
        eps = seg.eps(prof.s)
        expected = np.exp(-0.25j * np.unwrap(np.angle(eps)))
        # the two agree as long as the principal angle does not wrap
        assert np.allclose(prof.phase_factor, expected)

    def test_validation(self):
        with pytest.raises(ValidationError):
            TrajectorySegment(0.0)
        with pytest.raises(ValidationError):
            TrajectorySegment(1e-3, 0, (0.1, -0.1))
        with pytest.raises(ValidationError):
            phase_jump_profile(TrajectorySegment(1e-3), 1)


def test_point_json_roundtrip_keys():
    d = embed([0.6, 0.8]).to_json()
    assert set(d) == {"u", "chart", "conic_residual"}
    assert d["u"][0] == [1.0, 0.0]
    assert d["chart"] == "U2"
    assert cmath.isclose(complex(*d["conic_residual"]), 0, abs_tol=1e-15)
