import csv
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from conelab import GridOverflow
from conelab import fejer

GRID = fejer.GridSpec()
SMALL = fejer.GridSpec(L=100.0, N=1 << 14)
TAIL = 4 / (math.pi * GRID.L)


@pytest.fixture(scope="module")
def mu():
    return fejer.build_mu(GRID)


@pytest.fixture(scope="module")
def nu():
    return fejer.build_nu(GRID)


class TestKernel:
    def test_origin(self):
        assert fejer.fejer_kernel(0.0) == pytest.approx(1 / (2 * math.pi), abs=1e-12)
        assert fejer.fejer_kernel(0.0) == pytest.approx(0.1591549, abs=1e-7)

    def test_zero_at_two_pi(self):
        assert fejer.fejer_kernel(2 * math.pi) == pytest.approx(0.0, abs=1e-15)

    def test_matches_formula(self):
        y = np.linspace(0.1, 50, 500)
        expected = (np.sin(y / 2) / (y / 2)) ** 2 / (2 * math.pi)
        assert np.allclose(fejer.fejer_kernel(y), expected, rtol=1e-12)

    def test_tail_bound_and_sign(self):
        y = np.linspace(0.5, 1e4, 200_001)
        F = fejer.fejer_kernel(y)
        assert np.all(F >= 0)
        assert np.all(F <= 2 / (math.pi * y**2) * (1 + 1e-12))

    def test_unit_integral_by_quadrature(self):
        # integrate over whole periods so quad sees smooth pieces, tail bounded analytically
        edges = 2 * math.pi * np.arange(0, 400)
        total = 2 * sum(integrate.quad(fejer.fejer_kernel, a, b)[0] for a, b in zip(edges[:-1], edges[1:]))
        assert abs(total - 1) <= 2 * 2 / (math.pi * edges[-1])

    def test_transform_is_triangle(self):
        d = fejer.GridDensity(float(GRID.points()[0]), GRID.dy, fejer.fejer_kernel(GRID.points()))
        for t in (-0.5, 0.0, 0.5):
            assert abs(d.transform(t)[0] - (1 - abs(t))) <= 0.02
        for t in (-1.0, 1.0, 1.5):
            assert abs(d.transform(t)[0]) <= 0.02


class TestGrid:
    @pytest.mark.parametrize("N", [0, 3, 1000])
    def test_power_of_two(self, N):
        with pytest.raises(ValueError):
            fejer.GridSpec(N=N)

    def test_spacing(self):
        pts = SMALL.points()
        assert pts[0] == -SMALL.L and np.allclose(np.diff(pts), SMALL.dy)


class TestMeasures:
    def test_locations(self, mu, nu):
        assert mu.locations == [Fraction(-3), Fraction(1)]
        assert nu.locations == [Fraction(-2), Fraction(1)]

    def test_unit_mass(self, mu):
        assert abs(mu.density(1).mass() - 1) <= TAIL

    def test_tv_lower_bound_by_quadrature(self):
        # left parts are disjoint: |2cos(2y)|F at x=-3 and |2cos(10y)|F at x=-2
        y = np.linspace(-400, 400, 4_000_001)
        F = fejer.fejer_kernel(y)
        tv = integrate.trapezoid(np.abs(2 * np.cos(2 * y)) * F, y) + integrate.trapezoid(np.abs(2 * np.cos(10 * y)) * F, y)
        assert tv >= 0.5
        rep = fejer.verify_counterexample(SMALL, 1, ft_samples=0)
        assert rep.computed["tv_difference_left"] == pytest.approx(tv, abs=0.05)


class TestPowers:
    def test_first_power_is_identity(self, mu):
        assert fejer.product_power(mu, 1) is mu

    def test_mu_square_atoms(self, mu):
        sq = fejer.product_power(mu, 2)
        assert sq.locations == [Fraction(-6), Fraction(-2), Fraction(2)]
        # the cross term F * 2cos(2.)F has disjoint spectra and vanishes
        assert sq.density(-2).l1_mass() <= 0.02
        assert sq.density(2).l1_mass() > 0.9

    def test_nu_square_atoms(self, nu):
        sq = fejer.product_power(nu, 2)
        assert sq.locations == [Fraction(-4), Fraction(-1), Fraction(2)]
        assert sq.density(-1).l1_mass() <= 0.02

    def test_pruning_is_recorded(self, mu):
        sq = fejer.product_power(mu, 2, prune_below=0.002)
        assert sq.locations == [Fraction(-6), Fraction(2)]
        assert list(sq.pruned) == [Fraction(-2)] and sq.pruned[Fraction(-2)] < 0.002

    def test_matches_direct_convolution(self):
        grid = fejer.GridSpec(L=20.0, N=1 << 10)
        P = fejer.build_mu(grid)
        sq = fejer.product_power(P, 2)
        f1 = P.density(1).values
        assert np.allclose(sq.density(2).values, np.convolve(f1, f1) * grid.dy, atol=1e-12)

    def test_grid_budget(self, mu):
        with pytest.raises(GridOverflow):
            fejer.product_powers(mu, 3, max_samples=1 << 16)

    def test_spectral_disjointness(self):
        t = np.linspace(-5, 5, 100_001)
        for i in range(1, 6):
            for c in (2, -2, 10, -10):
                prod = np.clip(1 - np.abs(t), 0, None) ** i * np.clip(1 - np.abs(t - c), 0, None)
                assert np.max(prod) == 0.0


class TestTransforms:
    @pytest.mark.parametrize("k", [1, 2, 5])
    def test_closed_form_origin(self, k):
        assert fejer.closed_form_ft("mu", k, 0.0, 0.0) == 1

    def test_closed_form_side_branch(self):
        s = 0.7
        assert fejer.closed_form_ft("mu", 2, s, 2.0) == pytest.approx(np.exp(6j * s))

    def test_closed_form_outside(self):
        assert fejer.closed_form_ft("nu", 1, 0.3, 5.0) == 0

    def test_closed_form_unknown(self):
        with pytest.raises(ValueError):
            fejer.closed_form_ft("lambda", 1, 0, 0)

    def test_numeric_origin(self, mu):
        assert abs(fejer.numeric_ft(mu, 0.0, 0.0) - 1) <= 2 * TAIL

    def test_numeric_nu_side(self, nu):
        assert abs(fejer.numeric_ft(nu, 0.0, 10.0) - 1) <= 2 * TAIL

    def test_single_atom_edges(self):
        P = fejer.build_measure({1: None}, GRID)
        for t in (-1.0, 1.0):
            assert abs(fejer.numeric_ft(P, 0.3, t)) <= 0.02

    def test_lattice_matches_direct(self):
        P = fejer.build_mu(SMALL)
        idx = np.array([0, 7, 130, -45, 1000])
        s = np.array([0.0, 0.4, -1.2, 2.0, 3.0])
        vals, t = fejer.numeric_ft_lattice(P, s, idx)
        direct = [fejer.numeric_ft(P, si, ti) for si, ti in zip(s, t)]
        assert np.allclose(vals, direct, atol=1e-9)

    @pytest.mark.parametrize("name, build", [("mu", fejer.build_mu), ("nu", fejer.build_nu)])
    def test_numeric_matches_closed_form(self, name, build):
        P = build(GRID)
        rng = np.random.default_rng(3)
        for s, t in zip(rng.uniform(-3, 3, 40), rng.uniform(-12, 12, 40)):
            assert abs(fejer.numeric_ft(P, s, t) - fejer.closed_form_ft(name, 1, s, t)) <= 0.02


class TestVerify:
    def test_default_grid_passes(self, tmp_path):
        rep = fejer.verify_counterexample(GRID, 3, 0.02, ft_samples=200, dump_csv=tmp_path)
        assert rep.status == "pass", rep.computed["checks"]
        assert rep.computed["right_atoms"][1] == {"mu": [Fraction(1)], "nu": [Fraction(1)]}
        with (tmp_path / "power_2.csv").open() as fh:
            header = next(csv.reader(fh))
        assert header[0] == "y" and "mu_density_x=2" in header

    def test_coarse_grid_fails_loudly(self):
        rep = fejer.verify_counterexample(fejer.GridSpec(L=10.0, N=1 << 8), 2, 0.001, ft_samples=50)
        assert rep.failed and rep.witness["failed_checks"]

    def test_bad_k(self):
        with pytest.raises(ValueError):
            fejer.verify_counterexample(SMALL, 0)
