"""Filtration, persistence, and min-max values against hand oracles."""

import numpy as np
import pytest
from conftest import grid_values, random_trig_family

from jetspectra.families import GeneratingFamily
from jetspectra.filtration import RegularityError, build_filtration, region_arcs, region_mask
from jetspectra.persistence import reduce_filtration
from jetspectra.spectra import (
    SpectrumError,
    betti_of_region,
    generalized_critical_values,
    viterbo_numbers,
    viterbo_numbers_with_boundary,
)

TWO_PI = 2 * np.pi


# --- filtration construction ------------------------------------------------


def test_filtration_circle_by_cos():
    fam = GeneratingFamily(0, [], "cos(q)")
    X = build_filtration(fam, n_q=64)
    assert X.n_cells == 128  # vertices + edges, nothing collapsed
    assert X.n_relative == 0
    # faces precede cofaces and values are monotone along faces
    for j in range(X.n_cells):
        for f in X.faces_of(j):
            assert f < j
            assert X.values[f] <= X.values[j]


def test_filtration_stabilized_annulus():
    fam = GeneratingFamily(0, [], "cos(q)").stabilized(+1)
    X = build_filtration(fam, n_q=64, n_w=33)
    assert X.quad_index == 0
    assert X.n_relative == 0  # positive direction: no forced collapse
    assert X.n_cells == 64 * 33 + 64 * 33 + 64 * 32 + 64 * 32


def test_filtration_negative_direction_collapses_outer_faces():
    fam = GeneratingFamily(0, [], "cos(q)").stabilized(-1)
    X = build_filtration(fam, n_q=64, n_w=33)
    assert X.quad_index == 1
    # both outer vertex rows and their base edges are collapsed
    assert X.n_relative == 4 * 64


def test_filtration_region_three_arcs():
    fam = GeneratingFamily(0, [], "cos(q)")
    mask = region_mask("cos(3*q)", 384)
    assert len(region_arcs(mask)) == 3
    X = build_filtration(fam, n_q=384, region_f="cos(3*q)")
    n_vertices = int(np.sum(X.dims == 0))
    n_edges = int(np.sum(X.dims == 1))
    assert n_vertices == int(mask.sum())
    assert n_edges == n_vertices - 3  # three open arcs


def test_filtration_region_empty_errors():
    fam = GeneratingFamily(0, [], "cos(q)")
    with pytest.raises(ValueError):
        build_filtration(fam, n_q=64, region_f="-1 - 0*sin(q)")


def test_filtration_regularity_failure():
    fam = GeneratingFamily(0, [], "cos(q)")
    with pytest.raises(RegularityError):
        build_filtration(fam, n_q=64, region_f="sin(q)^2")


def test_filtration_grid_preconditions():
    fam = GeneratingFamily(0, [], "cos(q)")
    with pytest.raises(ValueError):
        build_filtration(fam, n_q=32)
    with pytest.raises(ValueError):
        build_filtration(fam.stabilized(1), n_q=64, n_w=21)


# --- persistence ------------------------------------------------------------


def test_persistence_circle_by_cos():
    fam = GeneratingFamily(0, [], "cos(q)")
    res = reduce_filtration(build_filtration(fam, n_q=256))
    assert [(e.dim, round(e.birth, 12)) for e in res.essentials] == [(0, -1.0), (1, 1.0)]
    assert not res.finite_pairs(1e-9)


def test_persistence_single_interval_increasing():
    # one arc; any strictly monotone-in-arc function has a single essential at its min
    fam = GeneratingFamily(0, [], "sin(q)")
    res = reduce_filtration(build_filtration(fam, n_q=256, region_f="cos(q)"))
    assert len(res.essentials) == 1
    e = res.essentials[0]
    assert e.dim == 0
    assert e.birth == pytest.approx(-1.0, abs=1e-3)


def test_persistence_circle_by_third_harmonic():
    fam = GeneratingFamily(0, [], "cos(3*q)")
    res = reduce_filtration(build_filtration(fam, n_q=384))
    assert [(e.dim, round(e.birth, 9)) for e in res.essentials] == [(0, -1.0), (1, 1.0)]
    finite = res.finite_pairs(1e-9)
    assert len(finite) == 2
    for p in finite:
        assert p.dim == 0
        assert p.birth == pytest.approx(-1.0, abs=1e-12)
        assert p.death == pytest.approx(1.0, abs=1e-12)


def _circle_betti_oracle(vals, level):
    """Brute-force sublevel Betti numbers of a cyclic vertex/edge complex."""
    present = vals <= level
    n = present.shape[0]
    if not present.any():
        return 0, 0
    if present.all():
        return 1, 1
    runs = 0
    for i in range(n):
        if present[i] and not present[i - 1]:
            runs += 1
    return runs, 0


def test_persistence_betti_curve_matches_bruteforce():
    fam = GeneratingFamily(0, [], "cos(3*q) + 0.2*sin(q)")
    X = build_filtration(fam, n_q=384)
    res = reduce_filtration(X)
    vals = grid_values(fam, 384)
    for level in np.linspace(-1.3, 1.3, 29):
        b0, b1 = _circle_betti_oracle(vals, level)
        assert res.betti_at(level, 0) == b0
        assert res.betti_at(level, 1) == b1


# --- min-max values ----------------------------------------------------------


def test_viterbo_numbers_linear_height():
    fam = GeneratingFamily(0, [], "3*cos(q) + 4*sin(q)")
    sp = viterbo_numbers(fam, n_q=4096)
    assert sp.values[0] == pytest.approx(-5.0, abs=0.016)
    assert sp.values[1] == pytest.approx(5.0, abs=0.016)
    assert sp.degrees == [0, 1]


def test_viterbo_numbers_zero_family_exact():
    sp = viterbo_numbers(GeneratingFamily(0, [], "0"), n_q=64)
    assert sp.values == [0.0, 0.0]


def test_viterbo_numbers_k0_equal_grid_extremes_exactly():
    rng = np.random.default_rng(11)
    for _ in range(5):
        fam = random_trig_family(rng, degree=4)
        n_q = 256
        sp = viterbo_numbers(fam, n_q=n_q)
        vals = grid_values(fam, n_q)
        assert sp.values[0] == float(vals.min())
        assert sp.values[1] == float(vals.max())


def test_viterbo_numbers_positive_stabilization_exact():
    base = GeneratingFamily(0, [], "cos(q)")
    sp = viterbo_numbers(base.stabilized(+1), n_q=64, n_w=33)
    assert sp.values[0] == pytest.approx(-1.0, abs=1e-12)
    assert sp.values[1] == pytest.approx(1.0, abs=1e-12)
    assert sp.degrees == [0, 1]
    assert sp.index_shift == 0


def test_viterbo_numbers_negative_stabilization_shifts_degrees():
    base = GeneratingFamily(0, [], "cos(q)")
    sp = viterbo_numbers(base.stabilized(-1), n_q=64, n_w=33)
    assert sp.values[0] == pytest.approx(-1.0, abs=1e-12)
    assert sp.values[1] == pytest.approx(1.0, abs=1e-12)
    assert sp.degrees == [0, 1]
    assert sp.index_shift == 1


def test_viterbo_numbers_k2_mixed_stabilization():
    fam = GeneratingFamily(2, [1, -1], "cos(q)", bound_radius=1.0)
    sp = viterbo_numbers(fam, n_q=64, n_w=33)
    assert sp.index_shift == 1
    assert sp.values[0] == pytest.approx(-1.0, abs=1e-12)
    assert sp.values[1] == pytest.approx(1.0, abs=1e-12)
    assert sp.degrees == [0, 1]


def test_viterbo_numbers_lipschitz_in_sup_norm():
    rng = np.random.default_rng(5)
    for _ in range(3):
        fam = random_trig_family(rng, degree=3)
        bump = 0.05 * rng.uniform(0.2, 1.0)
        shifted = GeneratingFamily(0, [], f"{str(fam.g)} + {bump!r}*sin(2*q)")
        a = viterbo_numbers(fam, n_q=128)
        b = viterbo_numbers(shifted, n_q=128)
        for x, y in zip(a.values, b.values):
            assert abs(x - y) <= bump + 1e-12


def test_viterbo_numbers_grid_refinement():
    fam = GeneratingFamily(0, [], "3*cos(q) + 4*sin(q)")
    a = viterbo_numbers(fam, n_q=128)
    b = viterbo_numbers(fam, n_q=256)
    h = TWO_PI / 128
    for x, y in zip(a.values, b.values):
        assert abs(x - y) <= 5.0 * h


# --- region Betti numbers, generalized critical values ----------------------


def test_betti_of_region_examples():
    assert betti_of_region("cos(3*q)", n_q=384) == 3
    assert betti_of_region("1 + 0*sin(q)", n_q=64) == 2
    assert betti_of_region("cos(q)", n_q=64) == 1


def test_generalized_critical_values_cos_in_third_harmonic_region():
    fam = GeneratingFamily(0, [], "cos(q)")
    vals = generalized_critical_values(fam, "cos(3*q)", n_q=384)
    boundary = sorted(v.value for v in vals if v.kind == "boundary")
    interior = sorted(v.value for v in vals if v.kind == "interior")
    # boundary points are the six roots of cos(3q); the only critical point
    # of cos inside {cos 3q >= 0} is its maximum at q = 0
    expected_roots = [np.pi / 6 + m * np.pi / 3 for m in range(6)]
    assert boundary == pytest.approx(sorted(np.cos(expected_roots)), abs=1e-9)
    assert interior == pytest.approx([1.0], abs=1e-9)


def test_generalized_critical_values_constant_family():
    fam = GeneratingFamily(0, [], "2 + 0*sin(q)")
    vals = generalized_critical_values(fam, "cos(3*q)", n_q=384)
    levels = sorted(set(round(v.value, 9) for v in vals))
    assert levels == [2.0]


def test_generalized_critical_values_tilted():
    fam = GeneratingFamily(0, [], "2 + 0.3*sin(q)")
    vals = generalized_critical_values(fam, "cos(3*q)", n_q=384)
    boundary = sorted(v.value for v in vals if v.kind == "boundary")
    roots = [np.pi / 6 + m * np.pi / 3 for m in range(6)]
    assert boundary == pytest.approx(sorted(2 + 0.3 * np.sin(roots)), abs=1e-9)


# --- boundary-relative min-max -----------------------------------------------


def test_viterbo_with_boundary_single_arc_boundary_attained():
    fam = GeneratingFamily(0, [], "cos(q)")
    sp = viterbo_numbers_with_boundary(fam, "cos(q)", n_q=512)
    assert sp.b == 1
    # min of cos over the arc [-pi/2, pi/2] is 0, attained at the endpoints
    assert sp.values[0] == pytest.approx(0.0, abs=2e-2)
    assert sp.boundary_attained == [True]


def test_viterbo_with_boundary_per_arc_minima():
    fam = GeneratingFamily(0, [], "2 + 0.3*sin(q)")
    sp = viterbo_numbers_with_boundary(fam, "cos(3*q)", n_q=768)
    assert sp.b == 3
    mask = region_mask("cos(3*q)", 768)
    vals = grid_values(fam, 768)
    oracle = sorted(float(vals[arc].min()) for arc in region_arcs(mask))
    assert sp.values == pytest.approx(oracle, abs=1e-12)
    assert all(v > 0 for v in sp.values)


def test_viterbo_with_boundary_constant_family():
    fam = GeneratingFamily(0, [], "-5 + 0*sin(q)")
    sp = viterbo_numbers_with_boundary(fam, "cos(3*q)", n_q=384)
    assert sp.values == pytest.approx([-5.0, -5.0, -5.0], abs=1e-12)


def test_viterbo_values_near_generalized_critical_values():
    fam = GeneratingFamily(0, [], "2 + 0.3*sin(q)")
    n_q = 768
    sp = viterbo_numbers_with_boundary(fam, "cos(3*q)", n_q=n_q)
    gcv = [g.value for g in generalized_critical_values(fam, "cos(3*q)", n_q=n_q)]
    tol = 2 * (TWO_PI / n_q) * 2.3  # two grid cells of value variation
    for c in sp.values:
        assert min(abs(c - g) for g in gcv) <= tol


def test_spectrum_error_when_bottom_eats_everything():
    fam = GeneratingFamily(0, [], "cos(q)")
    X = build_filtration(fam, n_q=64)
    X.values[:] = -10 * X.bounds.below  # simulate a misplaced bottom
    from jetspectra.spectra import _spectrum_from_complex

    with pytest.raises(SpectrumError):
        _spectrum_from_complex(X, expected_b=3)
