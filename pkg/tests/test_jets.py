"""Contact form, closure checks, positivity, fronts, embeddedness."""

import numpy as np
import pytest

from jetspectra.jets import (
    Isotopy,
    JetPoint,
    LegendrianLoop,
    check_embedded,
    check_legendrian,
    check_positive_isotopy,
    contact_form,
    front_projection,
    wrap_angle,
    wrap_delta,
)

TWO_PI = 2 * np.pi


def jet_graph_loop(f, df, n=256, offset=0.0):
    """Samples of the 1-jet extension of a function on the circle."""
    q = np.arange(n) * TWO_PI / n + offset
    return LegendrianLoop(q=q, p=df(q), u=f(q))


def test_wrap_angle_idempotent():
    x = np.linspace(-20, 20, 101)
    assert np.allclose(wrap_angle(wrap_angle(x)), wrap_angle(x))
    assert np.all(wrap_angle(x) >= 0) and np.all(wrap_angle(x) < TWO_PI)


def test_contact_form_vertical_raise():
    assert contact_form(JetPoint(0.3, 0.0, 0.0), (0.0, 0.0, 1.0)) == 1.0


def test_contact_form_flow_generator():
    # tangent of (q - t, p, u - eps t) against du - p dq with p = 3 eps
    eps = 0.1
    val = contact_form(JetPoint(1.0, 3 * eps, 0.0), (-1.0, 0.0, -eps))
    assert val == pytest.approx(2 * eps)


def test_contact_form_legendrian_direction():
    assert contact_form(JetPoint(0.0, 1.0, 2.0), (1.0, 5.0, 1.0)) == 0.0


def test_contact_form_linear_in_tangent():
    rng = np.random.default_rng(3)
    for _ in range(50):
        pt = JetPoint(*rng.uniform(-3, 3, 3))
        v = rng.uniform(-2, 2, 3)
        w = rng.uniform(-2, 2, 3)
        a, b = rng.uniform(-2, 2, 2)
        lhs = contact_form(pt, tuple(a * v + b * w))
        rhs = a * contact_form(pt, tuple(v)) + b * contact_form(pt, tuple(w))
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_check_legendrian_zero_section():
    loop = jet_graph_loop(lambda q: 0 * q, lambda q: 0 * q, n=256)
    rep = check_legendrian(loop)
    assert rep.passed and rep.max_defect == 0.0


def test_check_legendrian_cos_defect_scale():
    loop = jet_graph_loop(np.cos, lambda q: -np.sin(q), n=256)
    rep = check_legendrian(loop)
    assert rep.passed
    assert rep.max_defect < (1 / 256) ** 2


def test_check_legendrian_defect_second_order_or_better():
    d1 = check_legendrian(jet_graph_loop(np.cos, lambda q: -np.sin(q), n=128)).max_defect
    d2 = check_legendrian(jet_graph_loop(np.cos, lambda q: -np.sin(q), n=256)).max_defect
    assert d1 / d2 >= 3.5


def test_check_legendrian_rejects_nonlegendrian():
    n = 256
    q = np.arange(n) * TWO_PI / n
    loop = LegendrianLoop(q=q, p=np.zeros(n), u=np.sin(q))
    assert not check_legendrian(loop).passed


def test_positive_isotopy_vertical_raise():
    zero = jet_graph_loop(lambda q: 0 * q, lambda q: 0 * q, n=64)
    times = np.linspace(0.0, 1.0, 11)
    frames = [zero.translated(du=t) for t in times]
    rep = check_positive_isotopy(Isotopy(frames, times))
    assert rep.passed
    assert rep.min_alpha == pytest.approx(1.0)


def test_negative_isotopy_fails():
    zero = jet_graph_loop(lambda q: 0 * q, lambda q: 0 * q, n=64)
    times = np.linspace(0.0, 1.0, 11)
    frames = [zero.translated(du=-t) for t in times]
    rep = check_positive_isotopy(Isotopy(frames, times))
    assert not rep.passed
    assert rep.min_alpha == pytest.approx(-1.0)


def test_positivity_invariant_under_time_rescaling():
    loop = jet_graph_loop(np.cos, lambda q: -np.sin(q), n=64)
    times = np.linspace(0.0, 1.0, 9)
    frames = [loop.translated(du=t + 0.3 * t * t) for t in times]
    rep1 = check_positive_isotopy(Isotopy(frames, times))
    rep2 = check_positive_isotopy(Isotopy(frames, 5.0 * times))
    assert rep1.passed == rep2.passed
    assert rep2.min_alpha == pytest.approx(rep1.min_alpha / 5.0)


def test_isotopy_shape_mismatch():
    a = jet_graph_loop(np.cos, lambda q: -np.sin(q), n=64)
    b = jet_graph_loop(np.cos, lambda q: -np.sin(q), n=128)
    with pytest.raises(ValueError):
        Isotopy([a, b], np.array([0.0, 1.0]))


def test_front_of_zero_section_has_no_cusps():
    loop = jet_graph_loop(lambda q: 0 * q, lambda q: 0 * q, n=64)
    fr = front_projection(loop)
    assert fr.cusp_indices.size == 0
    assert np.allclose(fr.u, 0.0)


def test_front_of_cos_graph_has_no_cusps():
    loop = jet_graph_loop(np.cos, lambda q: -np.sin(q), n=128)
    assert front_projection(loop).cusp_indices.size == 0


def test_front_with_turning_base_has_cusps():
    # q(s) = s + 2 sin s reverses direction twice per period
    n = 512
    s = np.arange(n) * TWO_PI / n
    q = s + 2 * np.sin(s)
    loop = LegendrianLoop(q=q, p=np.ones(n), u=np.zeros(n))
    fr = front_projection(loop)
    assert fr.cusp_indices.size == 2


def test_check_embedded_graphs():
    assert check_embedded(jet_graph_loop(lambda q: 0 * q, lambda q: 0 * q, n=64), tol=1e-6)
    assert check_embedded(jet_graph_loop(np.cos, lambda q: -np.sin(q), n=64), tol=1e-6)


def test_check_embedded_figure_eight_trace():
    # explicit self-intersecting immersion: passes through (pi, 0, 0) twice
    n = 128
    s = np.arange(n) * TWO_PI / n
    q = np.pi + np.sin(s)
    u = 0.3 * np.sin(2 * s)
    loop = LegendrianLoop(q=q, p=np.zeros(n), u=u)
    assert not check_embedded(loop, tol=1e-6)


def test_wrap_delta_range():
    d = wrap_delta(np.array([3.2, -3.2, 0.1, 6.4]))
    assert np.all(d >= -np.pi) and np.all(d < np.pi)


def test_loop_rejects_unclosable_sampling():
    # a near-pi jump in q cannot be lifted consistently
    q = np.zeros(16)
    q[8:] += np.pi * 0.9999
    with pytest.raises(ValueError):
        LegendrianLoop(q=q, p=np.zeros(16), u=np.zeros(16))
