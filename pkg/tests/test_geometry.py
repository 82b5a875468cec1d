import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bstunnel.geometry import TunnelGeometry, build_layout, tag_position


def test_tag_position_midpoint():
    assert tag_position(1, 1, 40.0) == 20.0


def test_tag_position_first_of_twenty():
    assert tag_position(1, 20, 40.0) == pytest.approx(40 / 21)
    assert tag_position(1, 20, 40.0) == pytest.approx(1.90476, abs=1e-5)


@pytest.mark.parametrize("i", [0, 21, -1])
def test_tag_position_out_of_range(i):
    with pytest.raises(IndexError):
        tag_position(i, 20, 40.0)


def test_tag_position_rejects_bad_length():
    with pytest.raises(ValueError):
        tag_position(1, 3, 0.0)


def test_positions_increasing_and_interior():
    pos = [tag_position(i, 7, 30.0) for i in range(1, 8)]
    assert all(b > a for a, b in zip(pos, pos[1:]))
    assert 0 < pos[0] and pos[-1] < 30.0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(H_t=3.0, H_r=3.4),  # H_t < H_r
        dict(H_t=5.5),  # above the ceiling
        dict(L=0.0),
        dict(W=-1.0),
        dict(H_r=0.0),
    ],
)
def test_geometry_invariants(kwargs):
    with pytest.raises(ValueError):
        TunnelGeometry(**kwargs)


def test_direct_distance_at_entrance(geom):
    lay = build_layout(geom, 5, 0.0)
    assert lay.d_h == pytest.approx(1.5, abs=1e-15)


def test_paper_geometry_l1_10(geom):
    lay = build_layout(geom, 20, 10.0, alpha=2.0, eta=0.5)
    assert lay.d_h == pytest.approx(math.sqrt(102.25))
    assert lay.d_h == pytest.approx(10.11187, abs=1e-5)
    assert lay.c_const == pytest.approx(25.5625, rel=1e-14)


def test_first_forward_distance(geom):
    lay = build_layout(geom, 20, 10.0)
    expected = math.sqrt(0.4**2 + (40 / 21) ** 2)
    assert lay.d_f[0] == pytest.approx(expected, rel=1e-15)
    assert lay.d_f[0] == pytest.approx(1.946309, abs=1e-6)


@pytest.mark.parametrize(
    "args",
    [(-1, 10.0, 2.0, 0.5), (3, -0.1, 2.0, 0.5), (3, 41.0, 2.0, 0.5), (3, 10.0, 0.0, 0.5), (3, 10.0, 2.0, 1.2)],
)
def test_build_layout_rejects(geom, args):
    with pytest.raises(ValueError):
        build_layout(geom, *args)


def test_layout_is_immutable(geom):
    lay = build_layout(geom, 4, 10.0)
    with pytest.raises(ValueError):
        lay.c[0] = 1.0


layouts = st.builds(
    lambda n, frac, alpha, eta: build_layout(TunnelGeometry(), n, frac * 40.0, alpha, eta),
    st.integers(0, 60),
    st.floats(0, 1),
    st.floats(1.5, 4.0),
    st.floats(0.05, 1.0),
)


@settings(max_examples=60, deadline=None)
@given(layouts)
def test_layout_invariants(lay):
    geom = TunnelGeometry()
    assert lay.d_h**2 == pytest.approx((geom.H_t - geom.H_r) ** 2 + lay.l1**2, rel=1e-14)
    i = np.arange(1, lay.n_tags + 1)
    pos = i * geom.L / (lay.n_tags + 1)
    np.testing.assert_allclose(lay.d_f**2, (geom.H - geom.H_t) ** 2 + pos**2, rtol=1e-14)
    np.testing.assert_allclose(lay.d_g**2, (geom.H - geom.H_r) ** 2 + (lay.l1 - pos) ** 2, rtol=1e-14)
    np.testing.assert_allclose(lay.w * lay.c**2, 1.0, rtol=1e-13)
    assert lay.c_const == pytest.approx(lay.c0**2, rel=1e-15)
    assert lay.d_h > 0 and np.all(lay.d_f > 0) and np.all(lay.d_g > 0)


@pytest.mark.parametrize("n", [1, 2, 7, 20, 41])
def test_backward_distances_symmetric_at_mid_tunnel(geom, n):
    lay = build_layout(geom, n, geom.L / 2)
    np.testing.assert_allclose(lay.d_g, lay.d_g[::-1], rtol=1e-13)


def test_direct_distance_monotone_in_l1(geom):
    d = [build_layout(geom, 3, l1).d_h for l1 in np.linspace(0, 40, 81)]
    assert all(b > a for a, b in zip(d, d[1:]))


def test_weight_overflow_is_a_numerical_error(geom):
    with pytest.raises(FloatingPointError):
        build_layout(geom, 5, 20.0, alpha=300.0)
