"""Tests for the DPO and DTE bounds and the marginal-only baselines."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

import numpy as np
import pytest

from netdisrupt.core.bounds import (
    PairingMode,
    destroyed_created_bounds,
    dpo_bounds,
    dte_bounds,
    dte_curve,
    dte_grid,
    frechet_destroyed_created,
    frechet_hoeffding,
    mean_difference,
    pad_sorted,
    paired_products,
    pmf_cell_bounds,
)
from netdisrupt.core.models import BoundTerm
from netdisrupt.core.netmat import IndicatorSpectra, spectrum
from netdisrupt.errors import ValidationError
from tests.helpers import line, network, random_binary, random_valued, star


def test_pad_sorted_places_zeros_between_signs():
    """Padding re-sorts so zeros land between positive and negative values."""
    a, b = pad_sorted([3.0, -1.0], [2.0, 1.0, -4.0])

    assert a.tolist() == [3.0, 0.0, -1.0]
    assert b.tolist() == [2.0, 1.0, -4.0]


def test_paired_products_toy_spectra():
    """Co-pairing the star and line spectra leaves only the outer terms."""
    s_star, s_line = spectrum(star()), spectrum(line())
    outer = np.sqrt(5) * 2 * np.cos(np.pi / 7)
    expected_co = (outer + (-np.sqrt(5)) * 2 * np.cos(6 * np.pi / 7)) / 36

    assert paired_products(s_star, s_line, PairingMode.CO) == pytest.approx(expected_co)
    assert paired_products(s_star, s_line, "anti") == pytest.approx(-expected_co)


def test_dpo_bounds_contain_toy_values():
    """F(0, 0) for line (treated) vs star (control) can be 18/36 or 20/36."""
    bound = dpo_bounds(line(), star(), 0.0, 0.0)

    assert bound.contains(18 / 36, tol=1e-12)
    assert bound.contains(20 / 36, tol=1e-12)
    assert bound.y1 == 0.0 and bound.y0 == 0.0
    assert bound.upper <= 26 / 36 + 1e-12


def test_dpo_bounds_inside_frechet_hoeffding():
    """Spectral bounds never widen the marginal-only interval."""
    rng = np.random.default_rng(11)
    for _ in range(200):
        n1, n0 = int(rng.integers(3, 9)), int(rng.integers(3, 9))
        net1, net0 = random_valued(rng, n1), random_valued(rng, n0)
        y1, y0 = float(rng.choice([0.0, 1.0])), float(rng.choice([0.0, 1.0]))

        bound = dpo_bounds(net1, net0, y1, y0)
        baseline = frechet_hoeffding(net1, net0, y1, y0)

        assert baseline.lower - 1e-12 <= bound.lower <= bound.upper <= baseline.upper + 1e-12


def test_dpo_bounds_report_binding_terms():
    """A fully-below threshold makes the marginal bind on the upper side."""
    bound = dpo_bounds(line(), star(), 5.0, 0.0)

    assert bound.upper == pytest.approx(26 / 36)
    assert bound.upper_active in (BoundTerm.MARGINAL0, BoundTerm.CO_PAIRED)
    assert bound.lower == pytest.approx(26 / 36)
    assert bound.lower_active in (BoundTerm.SUM_MINUS_ONE, BoundTerm.ANTI_PAIRED)


def test_frechet_hoeffding_toy_counts():
    """Destroyed links in the toy example: marginal-only bounds are [0, 5] pairs."""
    baseline = frechet_destroyed_created(line(), star())

    lower, upper = baseline["destroyed"].as_pair_counts(6)
    assert lower == pytest.approx(0.0, abs=1e-12)
    assert upper == pytest.approx(5.0)


def test_mean_difference_toy():
    """Both toy networks have five links, so the mean difference is 0."""
    assert mean_difference(line(), star()) == 0.0


def test_destroyed_created_contain_toy_sets():
    """Spectral link-change bounds contain 3 and 4 destroyed and created pairs."""
    bounds = destroyed_created_bounds(line(), star())

    for kind in ("destroyed", "created"):
        assert bounds[kind].contains(6 / 36, tol=1e-12)
        assert bounds[kind].contains(8 / 36, tol=1e-12)


def test_link_change_needs_binary_networks():
    """Destroyed/created bounds are only defined for 0/1 outcomes."""
    weighted = network([[0, 2, 0], [2, 0, 1], [0, 1, 0]])
    with pytest.raises(ValidationError, match="0, 1"):
        destroyed_created_bounds(weighted, star(3))


def test_dte_grid():
    """Candidate y1 values are treated support plus shifted control support."""
    grid = dte_grid(line(), star(), -1.0)

    assert grid.tolist() == [-1.0, 0.0, 1.0]


def test_dte_bounds_toy_destroyed_fraction():
    """Delta(-1) is the destroyed fraction, 6/36 or 8/36, and is bounded away from 0."""
    bound = dte_bounds(line(), star(), -1.0)

    assert bound.contains(6 / 36, tol=1e-12)
    assert bound.contains(8 / 36, tol=1e-12)
    assert bound.lower > 0
    assert bound.lower_at == (0.0, 1.0)
    assert bound.upper_at is not None


def test_dte_bounds_empty_grid():
    """An explicit empty grid is refused."""
    with pytest.raises(ValidationError):
        dte_bounds(line(), star(), 0.0, grid=[])


def test_dte_curve_contract():
    """Curves are monotone, ordered, and cover the true destroyed fraction at y = -1."""
    rng = np.random.default_rng(7)
    grid = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]

    for _ in range(200):
        n = int(rng.integers(3, 10))
        net1, net0 = random_binary(rng, n), random_binary(rng, n)
        curve = dte_curve(net1, net0, grid)
        truth = float(np.mean((net1.values == 0) & (net0.values == 1)))

        assert np.all(np.diff(curve.lower) >= 0)
        assert np.all(np.diff(curve.upper) >= 0)
        assert np.all(curve.lower <= curve.upper)
        assert curve.lower[1] - 1e-12 <= truth <= curve.upper[1] + 1e-12


def test_dte_curve_rejects_unsorted_grid():
    """Grids must be sorted ascending and non-empty."""
    with pytest.raises(ValidationError, match="sorted"):
        dte_curve(line(), star(), [1.0, 0.0])
    with pytest.raises(ValidationError):
        dte_curve(line(), star(), [])


def test_pmf_cell_bounds_toy():
    """Cell bounds are clipped to the marginals and contain the achievable joint pmf."""
    table = pmf_cell_bounds(line(), star())

    assert table.support1.tolist() == [0.0, 1.0]
    assert table.support0.tolist() == [0.0, 1.0]
    assert table.marginals1.tolist() == pytest.approx([26 / 36, 10 / 36])

    destroyed = table.cell(0.0, 1.0)
    assert destroyed.contains(6 / 36, tol=1e-12) and destroyed.contains(8 / 36, tol=1e-12)
    both = table.cell(1.0, 1.0)
    assert both.contains(2 / 36, tol=1e-12) and both.contains(4 / 36, tol=1e-12)
    assert both.upper <= 10 / 36 + 1e-12

    lower, upper = table.altered_fraction()
    assert lower <= 12 / 36 <= upper


def test_pmf_cell_bounds_support_limit():
    """Outcomes with too many distinct values are refused."""
    rng = np.random.default_rng(1)
    net = random_valued(rng, 8, levels=tuple(float(k) for k in range(20)))
    with pytest.raises(ValidationError, match="distinct values"):
        pmf_cell_bounds(net, net, max_support=5)


def test_pmf_cell_bounds_with_masked_network():
    """Masked cells are excluded from the marginals and recorded."""
    from netdisrupt.core.netmat import symmetrize_bipartite

    net1 = symmetrize_bipartite(["r1", "r2"], ["c1", "c2"], [[1, 0], [0, 1]], group=1)
    net0 = symmetrize_bipartite(["r1", "r2"], ["c1", "c2"], [[1, 1], [0, 0]])
    table = pmf_cell_bounds(net1, net0)

    assert table.masked1 == pytest.approx(0.5)
    assert sum(table.marginals1) == pytest.approx(0.5)
    for row in table.cells:
        for cell in row:
            assert 0.0 <= cell.lower <= cell.upper <= 0.5 + 1e-12


def test_denoising_cache_reaches_every_bound():
    """A caller's empty cache is used as given, so its denoiser shapes the bounds."""
    rng = np.random.default_rng(41)
    net1, net0 = random_binary(rng, 30), random_binary(rng, 30)
    calls = []

    def wipe(net):
        calls.append(net.name)
        return net.with_values(np.zeros((net.n, net.n)))

    spectra = IndicatorSpectra(denoise=wipe)
    bound = dpo_bounds(net1, net0, 0.0, 0.0, spectra=spectra)
    assert calls and len(spectra) > 0
    assert bound.upper == pytest.approx(0.0, abs=1e-12)
    assert dpo_bounds(net1, net0, 0.0, 0.0).upper > 0.01

    cached = len(spectra)
    dpo_bounds(net1, net0, 0.0, 0.0, spectra=spectra)
    assert len(spectra) == cached

    for run in (
        lambda cache: pmf_cell_bounds(net1, net0, spectra=cache),
        lambda cache: dte_curve(net1, net0, [-1.0, 0.0, 1.0], spectra=cache),
    ):
        calls.clear()
        cache = IndicatorSpectra(denoise=wipe)
        run(cache)
        assert calls and len(cache) > 0


def test_bounds_ignore_relabeling_of_either_arm():
    """Independent relabelings of the two arms leave every bound unchanged."""
    rng = np.random.default_rng(42)

    for _ in range(50):
        n1, n0 = int(rng.integers(3, 9)), int(rng.integers(3, 9))
        net1, net0 = random_valued(rng, n1), random_valued(rng, n0)
        moved1 = net1.relabel(rng.permutation(n1))
        moved0 = net0.relabel(rng.permutation(n0))
        y1, y0, y = (float(v) for v in rng.choice([0.0, 1.0, 2.0], size=3))

        for bound in (dpo_bounds, frechet_hoeffding):
            a, b = bound(net1, net0, y1, y0), bound(moved1, moved0, y1, y0)
            assert (b.lower, b.upper) == pytest.approx((a.lower, a.upper), abs=1e-10)

        a, b = dte_bounds(net1, net0, y - 1.0), dte_bounds(moved1, moved0, y - 1.0)
        assert (b.lower, b.upper) == pytest.approx((a.lower, a.upper), abs=1e-10)

        a, b = pmf_cell_bounds(net1, net0), pmf_cell_bounds(moved1, moved0)
        assert np.allclose(a.lower_matrix(), b.lower_matrix(), atol=1e-10)
        assert np.allclose(a.upper_matrix(), b.upper_matrix(), atol=1e-10)
        assert mean_difference(net1, net0) == pytest.approx(mean_difference(moved1, moved0))

        links1, links0 = random_binary(rng, n1), random_binary(rng, n0)
        plain = destroyed_created_bounds(links1, links0)
        moved = destroyed_created_bounds(
            links1.relabel(rng.permutation(n1)), links0.relabel(rng.permutation(n0))
        )
        for kind in ("destroyed", "created"):
            assert moved[kind].lower == pytest.approx(plain[kind].lower, abs=1e-10)
            assert moved[kind].upper == pytest.approx(plain[kind].upper, abs=1e-10)


def test_pmf_cell_table_is_consistent_with_marginals():
    """Row and column sums of the cell bounds bracket the exact marginals."""
    rng = np.random.default_rng(43)

    for _ in range(100):
        n = int(rng.integers(3, 12))
        levels = tuple(float(k) for k in range(int(rng.integers(2, 5))))
        table = pmf_cell_bounds(random_valued(rng, n, levels), random_valued(rng, n, levels))
        lower, upper = table.lower_matrix(), table.upper_matrix()

        assert np.sum(table.marginals1) == pytest.approx(1.0)
        assert np.sum(table.marginals0) == pytest.approx(1.0)
        assert np.all(lower >= 0.0) and np.all(upper <= 1.0) and np.all(lower <= upper)
        assert np.all(lower.sum(axis=1) <= table.marginals1 + 1e-9)
        assert np.all(table.marginals1 <= upper.sum(axis=1) + 1e-9)
        assert np.all(lower.sum(axis=0) <= table.marginals0 + 1e-9)
        assert np.all(table.marginals0 <= upper.sum(axis=0) + 1e-9)


if __name__ == "__main__":
    test_paired_products_toy_spectra()
    test_dpo_bounds_contain_toy_values()
    test_dte_bounds_toy_destroyed_fraction()
    print("All tests passed!")
