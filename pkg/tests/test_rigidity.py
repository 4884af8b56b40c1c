import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from epkit import kernels
from epkit.errors import EPCollision, InvalidBinding, NotNormalized, ValidationError
from epkit.model import Hamiltonian2, eigen_decompose, normalize_diagonal_chart
from epkit.rigidity import (CSV_HEADER, Axis, ScanSpec, phase_rigidity, rigidity_asymptote_check,
                            rigidity_of_line, scan_landscape)
from oracles import dense_eig, reduced_matrix

finite = st.floats(-4, 4, allow_nan=False)


@given(finite, finite)
def test_rigidity_bounds_and_identities(a, b):
    chi = np.array([1.0, complex(a, b)])
    assume(abs(chi @ chi) > 1e-4)
    res = rigidity_of_line(chi)
    assert 0 <= res.r <= 1 + 1e-12
    assert res.norm_sq >= 1 - 1e-12
    assert res.real_norm - res.imag_norm == pytest.approx(1, abs=1e-8 * res.norm_sq)
    assert abs(res.cross) < 1e-8 * res.norm_sq
    assert res.norm_sq == pytest.approx(1 + 2 * res.imag_norm, rel=1e-10)
    assert math.cosh(res.beta) ** 2 == pytest.approx(res.real_norm, rel=1e-8)


def test_real_states_are_rigid():
    assert phase_rigidity([0.6, 0.8]).r == pytest.approx(1)
    assert phase_rigidity([1, 0]).beta == 0


def test_not_normalized():
    with pytest.raises(NotNormalized):
        phase_rigidity([1, 1])
    with pytest.raises(NotNormalized):
        rigidity_of_line([1, 1j])


def test_rigidity_matches_dense_eigenvectors():
    z = 0.3 + 0.8j
    _, vecs = dense_eig(reduced_matrix(0, z, 1.0))
    pair = normalize_diagonal_chart(eigen_decompose(Hamiltonian2.from_reduced(0, z, 1.0)))
    r_dense = sorted(rigidity_of_line(vecs[:, k]).r for k in range(2))
    r_ours = sorted(phase_rigidity(p).r for p in (pair.phi_plus, pair.phi_minus))
    assert np.allclose(r_dense, r_ours)


class TestAsymptote:
    def test_square_root_law(self):
        chk = rigidity_asymptote_check([1e-2, 1e-4, 1e-6])
        assert chk.monotone
        assert chk.deviation[-1] < 1e-5

    def test_directions_and_branches(self):
        for direction in (1, 1j, -1, -1j):
            chk = rigidity_asymptote_check([1e-4 * direction, 1e-6 * direction], branch=-1)
            assert chk.max_deviation < 1e-2

    def test_collision(self):
        with pytest.raises(EPCollision):
            rigidity_asymptote_check([1e-12])


def _spec(x_field="eps1.re", y_field="eps1.im", base=None, n=(21, 11), ranges=((-1, 1), (-1, 1))):
    base = base or Hamiltonian2(0, 0, 0.5)
    return ScanSpec(base, Axis(x_field, *ranges[0], n[0]), Axis(y_field, *ranges[1], n[1]))


class TestLandscape:
    def test_hermitian_slice_is_rigid(self):
        grid = scan_landscape(_spec(y_field="eps2.re"))
        assert np.allclose(grid.r_plus, 1)
        assert np.allclose(grid.e_plus.imag, 0)

    def test_ep_cells_flagged(self):
        # eps1 - eps2 = 2 i omega puts Z = i on the grid point (0, 1)
        spec = _spec(ranges=((-1, 1), (0, 2)), n=(21, 21))
        grid = scan_landscape(spec)
        j, i = np.argwhere(grid.ep_flag == kernels.FLAG_EP)[0]
        assert grid.x[i] == pytest.approx(0, abs=1e-12) and grid.y[j] == pytest.approx(1)
        assert grid.r_plus[j, i] == 0
        near = grid.r_plus[j, i + 1]
        assert 0 < near < 0.5

    def test_zero_coupling_is_diagonal(self):
        grid = scan_landscape(_spec(base=Hamiltonian2(0, 0, 0), y_field="eps2.re"))
        assert np.all(grid.r_plus == 1)
        assert np.all(grid.ep_flag == kernels.FLAG_DIAGONAL)

    def test_matches_scalar_path(self):
        grid = scan_landscape(_spec(n=(5, 4)))
        for j, y in enumerate(grid.y):
            for i, x in enumerate(grid.x):
                h = Hamiltonian2(complex(x, y), 0, 0.5)
                if abs(h.z**2 + 1) < 1e-6:
                    continue
                pair = normalize_diagonal_chart(eigen_decompose(h))
                ref = {round(pair.e_plus.real, 9): phase_rigidity(pair.phi_plus).r,
                       round(pair.e_minus.real, 9): phase_rigidity(pair.phi_minus).r}
                got = ref.get(round(grid.e_plus[j, i].real, 9))
                assert got is not None and got == pytest.approx(grid.r_plus[j, i], abs=1e-10)

    def test_thread_count_does_not_change_output(self):
        spec = _spec(n=(31, 17))
        texts = {scan_landscape(spec, threads=t).to_csv() for t in (1, 2, 4, 7)}
        assert len(texts) == 1

    def test_csv_layout(self):
        text = scan_landscape(_spec(n=(3, 2))).to_csv(branch=-1)
        lines = text.splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) == 7 and text.endswith("\n")
        assert [ln.split(",")[1] for ln in lines[1:]] == ["-1"] * 3 + ["1"] * 3

    def test_bindings(self):
        with pytest.raises(InvalidBinding):
            Axis("eps3.re", 0, 1, 3)
        with pytest.raises(InvalidBinding):
            _spec(x_field="omega.re", y_field="omega.re")
        with pytest.raises(ValidationError):
            Axis("eps1.re", 0, 1, 0)
        with pytest.raises(ValidationError):
            scan_landscape(_spec(), threads=0)
