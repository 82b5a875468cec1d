import math

import numpy as np
import pytest

from bstunnel.quadrature import QuadratureError, gauss_kronrod


def test_rule_is_exact_for_polynomials():
    # a single K15 panel integrates degree <= 22 exactly
    coeffs = np.random.default_rng(0).normal(size=23)
    poly = np.polynomial.Polynomial(coeffs)
    exact = poly.integ()(1.0) - poly.integ()(-1.0)
    from bstunnel.quadrature import _gk15

    kron, err = _gk15(poly, -1.0, 1.0)
    assert kron == pytest.approx(exact, rel=1e-13)


def test_gauss_nodes_match_legendre():
    from bstunnel import quadrature as q

    nodes, weights = np.polynomial.legendre.leggauss(7)
    used = q._GWEIGHTS > 0
    np.testing.assert_allclose(np.sort(q._NODES[used]), np.sort(nodes), atol=1e-15)
    np.testing.assert_allclose(q._GWEIGHTS[used][np.argsort(q._NODES[used])], weights[np.argsort(nodes)], atol=1e-15)


@pytest.mark.parametrize(
    "f,a,b,exact",
    [
        (np.exp, 0.0, 1.0, math.e - 1.0),
        (lambda x: np.log(x), 0.0, 1.0, -1.0),
        (lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, 2.0),
        (lambda x: np.sin(50 * x) ** 2, 0.0, math.pi, math.pi / 2),
    ],
)
def test_adaptive_integrals(f, a, b, exact):
    res = gauss_kronrod(f, a, b, epsabs=1e-11, epsrel=0.0)
    assert res.value == pytest.approx(exact, abs=1e-9)
    assert res.error <= 1e-11


def test_budget_exhaustion_reports_diagnostics():
    with pytest.raises(QuadratureError) as info:
        gauss_kronrod(lambda x: np.sign(np.sin(1 / x)), 1e-9, 1.0, epsabs=1e-14, max_intervals=20)
    assert info.value.intervals >= 20
    assert "error estimate" in str(info.value)
