import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ism2d import make_grid, sample, volume_integral, ScalarField
from ism2d.domain import DomainError

from conftest import grid_at, observed_orders, sup


class TestMakeGrid:
    def test_spacing_9(self):
        g = make_grid(9, 9, 1.0, 1.0)
        assert g.dx == 0.125 and g.dz == 0.125

    def test_spacing_129(self):
        g = make_grid(129, 129, 1.0, 1.0)
        assert g.dx == 1.0 / 128

    def test_spacing_anisotropic(self):
        g = make_grid(65, 129, 2.0, 1.0)
        assert g.dx == 2.0 / 64 == 0.03125
        assert g.dz == 1.0 / 128

    def test_nodes_include_walls(self):
        g = make_grid(9, 17, 2.0, 1.0)
        assert g.x[0] == 0.0 and g.x[-1] == pytest.approx(2.0, abs=0)
        assert g.z[0] == 0.0 and g.z[-1] == pytest.approx(1.0, abs=0)
        assert np.allclose(g.x, np.arange(9) * g.dx, atol=0)

    @pytest.mark.parametrize("nx,nz,Lx,Lz", [
        (8, 9, 1, 1), (9, 8, 1, 1), (9, 9, 0, 1), (9, 9, 1, -2),
    ])
    def test_rejects_bad_input(self, nx, nz, Lx, Lz):
        with pytest.raises(DomainError):
            make_grid(nx, nz, Lx, Lz)


class TestSample:
    def test_zero(self, unit_grid):
        f = sample(unit_grid, lambda x, z: 0.0 * x)
        assert sup(f.data) == 0.0

    def test_linear_z(self):
        g = make_grid(9, 9, 1.0, 1.0)
        f = sample(g, lambda x, z: z)
        assert np.allclose(f.data[:, 0], np.arange(9) * 0.125, atol=0)

    def test_matches_pointwise(self, unit_grid):
        # oracle: direct evaluation node by node
        f = sample(unit_grid, lambda x, z: np.sin(np.pi * x) * np.sin(np.pi * z))
        for i, j in [(0, 0), (5, 7), (16, 16), (32, 1)]:
            xv, zv = unit_grid.x[i], unit_grid.z[j]
            assert f.at(i, j) == pytest.approx(np.sin(np.pi * xv) * np.sin(np.pi * zv),
                                               abs=1e-15)

    def test_nonfinite_rejected(self, unit_grid):
        with pytest.raises(DomainError):
            sample(unit_grid, lambda x, z: np.where(x > 0.5, np.inf, 0.0))

    @given(i=st.integers(0, 32), j=st.integers(0, 32))
    @settings(max_examples=30, deadline=None)
    def test_indexing_roundtrip(self, i, j):
        g = grid_at(33)
        f = sample(g, lambda x, z: np.cos(x) + z * z)
        expected = np.cos(g.x[i]) + g.z[j] ** 2
        assert f.values[j * g.nx + i] == expected
        assert f.at(i, j) == expected


class TestVolumeIntegral:
    def test_constant(self, unit_grid):
        f = sample(unit_grid, lambda x, z: 1.0 + 0 * x)
        assert volume_integral(f) == pytest.approx(1.0, abs=1e-14)

    def test_linear_exact(self, unit_grid):
        f = sample(unit_grid, lambda x, z: z)
        assert volume_integral(f) == pytest.approx(0.5, abs=1e-14)

    def test_sinsin(self):
        # oracle: int sin(pi x) sin(pi z) over unit square = 4/pi^2
        errs = []
        for n in (33, 65, 129):
            g = grid_at(n)
            f = sample(g, lambda x, z: np.sin(np.pi * x) * np.sin(np.pi * z))
            errs.append(abs(volume_integral(f) - 4 / np.pi**2))
        assert errs[-1] < 1e-4
        assert all(1.8 <= o <= 2.2 for o in observed_orders(errs))

    @given(a=st.floats(-5, 5), b=st.floats(-5, 5), c=st.floats(-5, 5),
           d=st.floats(-5, 5))
    @settings(max_examples=25, deadline=None)
    def test_bilinear_exact(self, a, b, c, d):
        g = grid_at(17, Lx=2.0, Lz=1.0)
        f = sample(g, lambda x, z: a + b * x + c * z + d * x * z)
        exact = (a * 2.0 + b * 2.0 + c * 1.0 + d * 1.0)  # integrals over [0,2]x[0,1]
        assert volume_integral(f) == pytest.approx(exact, abs=1e-13 * (1 + abs(exact)))


def test_fields_immutable(unit_grid):
    f = sample(unit_grid, lambda x, z: x)
    with pytest.raises(ValueError):
        f.data[0, 0] = 7.0


def test_field_shape_mismatch(unit_grid):
    with pytest.raises(DomainError):
        ScalarField(unit_grid, np.zeros((4, 4)))
