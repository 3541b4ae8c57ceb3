#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Tests of the market constants, utilities, and closed-form best responses.
"""
import math
from fractions import Fraction

import numpy
import pytest
from tlagame.game import MarketCoefficients
from tlagame.game import SessionGameConstants
from tlagame.game import market_coefficients
from tlagame.game import get_game_constants
from tlagame.game import mo_utility
from tlagame.game import mo_utility_taylor
from tlagame.game import mo_best_response
from tlagame.game import ue_utility
from tlagame.game import ue_session_utility
from tlagame.game import ue_best_response_session
from tlagame.game import ue_session_profit
from tlagame.solver import numeric_mo_oracle
from tlagame.solver import numeric_price_oracle
from tlagame.utils.data import SessionEstimates
from tlagame.utils.data import get_forecasts
from tlagame.utils.errors import InvalidArgumentError
from tlagame.utils.errors import ConfigurationError


def _estimates(psi):
    """A SessionEstimates with the given overall energies and unit transmission cost."""
    psi = numpy.asarray(psi, dtype=float)
    return SessionEstimates(
        ue=1, theta=0.5, iterations=1., f_k=0., load_states=[0]*psi.size, f_ex=[0.]*psi.size,
        gain_states=[0]*psi.size, gains=[1.]*psi.size, E_F=psi-0.5, E_C=[0.5]*psi.size, psi=psi)


def test_market_coefficients():
    """A and B of the printed closed form."""
    coeffs = market_coefficients(4, 0.5)
    v, K = Fraction(1, 2), 4
    denominator = (1 - v) * (K * v + 1 - v)
    assert coeffs.A == float(-(1 - 2 * v + K * v) / denominator) == -1.6
    assert coeffs.B == float(v / denominator) == 0.4

    for K in (1, 3, 17):
        coeffs = market_coefficients(K, 0.)
        assert (coeffs.A, coeffs.B) == (-1., 0.)

    coeffs = market_coefficients(2, 0.5)
    assert coeffs.A == pytest.approx(-4./3.)
    assert coeffs.B == pytest.approx(2./3.)

    with pytest.raises(InvalidArgumentError, match="substitutability"):
        market_coefficients(4, 1.)

    with pytest.raises(InvalidArgumentError, match="at least one UE"):
        market_coefficients(0, 0.5)


def test_game_constants(builder):
    """C follows the EX load; the load-unaware view zeroes it."""
    scenario = builder(loads=(2,), sessions=2)
    fcst = get_forecasts(scenario)[0]

    consts = get_game_constants(fcst, scenario.contract)
    assert numpy.allclose(consts.C, 2.4e-10, rtol=1e-12, atol=0.)
    assert consts.D == pytest.approx(7.2e-11)
    assert consts.E_C.size == 2

    flat = get_game_constants(fcst, scenario.contract, load_aware=False)
    assert numpy.all(flat.C == 0.)
    assert flat.D == consts.D


def test_mo_utility():
    """Exact-count investment."""
    assert mo_utility(numpy.zeros((2, 3)), [0., 0.], 0.5, [1., 1.]) == 0.
    assert mo_utility([[1.]], [0.5], 0., [1.]) == pytest.approx(math.log(2.) + 0.125)
    assert mo_utility(numpy.zeros((2, 1)), [1., 1.], 0.5, [1., 1.]) == pytest.approx(1.5)


def test_mo_utility_taylor():
    """Taylor-count investment."""
    coeffs = market_coefficients(1, 0.)
    assert mo_utility_taylor([[1.]], [0.5], coeffs, [1.]) == pytest.approx(0.625)
    assert mo_utility_taylor(numpy.zeros((1, 2)), [0.], coeffs, [1.]) == 0.

    coeffs = market_coefficients(2, 0.5)
    assert mo_utility_taylor([[3., 1.], [2., 5.]], [1., 1.], coeffs, [1., 1.]) == pytest.approx(1.5)


def test_mo_best_response_examples():
    """Both response modes on hand-checked inputs."""
    coeffs = market_coefficients(4, 0.5)

    for mode in ("printed", "derived"):
        assert numpy.array_equal(mo_best_response(numpy.zeros((4, 2)), coeffs, [1.]*4, mode), [0.]*4)

    prices = [[0.5, 0.5], [1., 0.], [0., 1.], [1., 0.]]
    printed = mo_best_response(prices, coeffs, [1.]*4, "printed")
    assert printed[0] == pytest.approx(-0.4)

    derived = mo_best_response(prices, coeffs, [1.]*4, "derived")
    assert numpy.allclose(derived, -printed, rtol=0., atol=1e-12)


def test_mo_best_response_errors():
    """eta must be 1 for the printed mode; unknown modes are rejected."""
    coeffs = market_coefficients(2, 0.5)

    with pytest.raises(ConfigurationError, match="eta = 1"):
        mo_best_response([[1.], [1.]], coeffs, [1., 2.], "printed")

    with pytest.raises(InvalidArgumentError, match="unknown"):
        mo_best_response([[1.], [1.]], coeffs, [1., 1.], "cournot")


def test_mo_best_response_foc_equivalence():
    """Derived mode solves the FOC, agrees with the closed-form oracle, and negates printed mode."""
    rng = numpy.random.default_rng(20230117)

    for _ in range(120):
        K = int(rng.integers(1, 9))  # pylint: disable=invalid-name
        v = float(rng.uniform(0., 0.9))
        prices = rng.uniform(0., 1., (K, int(rng.integers(1, 6))))
        etas = numpy.ones(K)
        coeffs = market_coefficients(K, v)

        derived = mo_best_response(prices, coeffs, etas, "derived")
        mat = (1. - v) * numpy.eye(K) + v
        assert numpy.abs(mat @ derived - etas * prices.sum(axis=1)).max() <= 1e-9

        assert numpy.allclose(derived, numeric_mo_oracle(prices, coeffs, etas), rtol=0., atol=1e-10)

        printed = mo_best_response(prices, coeffs, etas, "printed")
        assert numpy.allclose(printed, -derived, rtol=0., atol=1e-12)


def test_numeric_mo_oracle_examples():
    """Zero prices, a 2x2 hand solve, and permutation symmetry."""
    coeffs = market_coefficients(2, 0.5)
    assert numpy.array_equal(numeric_mo_oracle(numpy.zeros((2, 1)), coeffs, [1., 1.]), [0., 0.])
    assert numpy.allclose(numeric_mo_oracle([[1.], [0.]], coeffs, [1., 1.]), [4./3., -2./3.])

    theta = numeric_mo_oracle([[0.3, 0.2], [0.1, 0.4]], coeffs, [1., 1.])
    assert theta[0] == pytest.approx(theta[1])


def test_ue_utility():
    """Payments minus overall energies."""
    est = _estimates([1., 3.])

    assert ue_utility(0, numpy.zeros((1, 2)), est, 1.) == pytest.approx(-4.)
    assert ue_utility(0, [[2., 2.]], est, 1.) == pytest.approx(0.)
    assert ue_utility(0, [[0.5, 1.5]], est, 2.) == pytest.approx(0.)
    assert ue_utility(0, [[2., 2.]], est, 1., forfeited=(2,)) == pytest.approx(-2.)


def test_ue_session_utility():
    """(rho - C) X - D X^2 - E_C."""
    flat = MarketCoefficients(A=0., B=0., K=1, v=0.)
    consts = SessionGameConstants(C=0.3, D=0.2, V=5., E_C=0.1)
    assert ue_session_utility(2., 2., consts, flat) == pytest.approx(2. - 0.3 - 0.2 - 0.1)

    coeffs = market_coefficients(4, 0.5)
    consts = SessionGameConstants(C=0.7, D=0., V=0.3, E_C=0.)
    assert ue_session_utility(0.7, 0.7, consts, coeffs) == 0.

    consts = SessionGameConstants(C=0., D=7.2e-11, V=0., E_C=2.9e-10)
    expected = 0.5 * 0.2 - 7.2e-11 * 0.04 - 2.9e-10
    assert ue_session_utility(0.5, 0.5, consts, coeffs) == pytest.approx(expected, rel=1e-12)


def test_ue_best_response_session_examples():
    """Closed-form prices, clamping, and a degenerate market."""
    coeffs = MarketCoefficients(A=-1.6, B=0.4, K=4, v=0.5)
    consts = SessionGameConstants(C=0., D=0., V=0., E_C=0.)
    assert ue_best_response_session(1, consts, coeffs, 0.) == pytest.approx(0.3125)
    assert ue_best_response_session(1, consts, coeffs, 1.) == 0.
    assert ue_best_response_session(1, consts, coeffs, 1., clamp=False) == pytest.approx(0.3125-1.)

    sessions = SessionGameConstants(C=numpy.array([0., 2.4e-10]), D=7.2e-11, V=numpy.array([1., 1.]), E_C=0.)
    vector = ue_best_response_session(None, sessions, coeffs, 0.)
    assert vector[1] > vector[0]
    assert vector[1] == ue_best_response_session(2, sessions, coeffs, 0.)

    with pytest.raises(InvalidArgumentError, match="degenerate"):
        ue_best_response_session(1, consts, MarketCoefficients(A=0., B=0., K=1, v=0.), 0.)


def test_ue_best_response_session_matches_golden_section():
    """The closed form is the argmax of the single-session utility."""
    rng = numpy.random.default_rng(7)

    cases = [(-1.6, 0.4, 1., 2.4e-10, 7.2e-11)] + [
        (rng.uniform(-5., -0.5), rng.uniform(0., 1.), rng.uniform(0., 0.5), rng.uniform(0., 1e-9),
         rng.uniform(0., 1e-9))
        for _ in range(120)
    ]

    for A, B, V, C, D in cases:  # pylint: disable=invalid-name
        coeffs = MarketCoefficients(A=A, B=B, K=2, v=0.5)
        consts = SessionGameConstants(C=C, D=D, V=V, E_C=0.)
        closed = ue_best_response_session(1, consts, coeffs, 0., clamp=False)

        numeric = numeric_price_oracle(
            lambda rho, c=consts, m=coeffs: ue_session_utility(rho, rho, c, m), -50., 50.)
        assert numeric == pytest.approx(closed, rel=1e-6)


def test_ue_utility_balances_payments():
    """U_k + sum(psi) == sum(payments) when the subtraction is exact."""
    est = _estimates([1., 3.])
    profit = ue_utility(0, [[1.1, 2.3]], est, 1.7)
    assert profit + est.psi.sum() == (numpy.array([1.1, 2.3]) * 1.7).sum()

    rng = numpy.random.default_rng(11)
    for _ in range(100):
        est = _estimates(rng.uniform(1., 5., 4))
        iterations = rng.uniform(0.5, 3.)
        prices = est.psi * rng.uniform(0.6, 1.9) / iterations
        profit = ue_utility(0, [prices], est, iterations)
        assert profit + est.psi.sum() == (prices * iterations).sum()


def test_ue_session_utility_is_strictly_concave():
    """Second differences in the price equal 2 A (1 - A D) h^2 < 0."""
    rng = numpy.random.default_rng(3)

    for _ in range(200):
        coeffs = MarketCoefficients(A=rng.uniform(-5., -0.1), B=rng.uniform(0., 1.), K=2, v=0.5)
        consts = SessionGameConstants(
            C=rng.uniform(0., 1.), D=rng.uniform(0., 1.), V=rng.uniform(0., 10.), E_C=rng.uniform(0., 1.))
        rho, step = rng.uniform(0., 10.), rng.uniform(0.05, 1.)

        utils = [ue_session_utility(x, x, consts, coeffs) for x in (rho-step, rho, rho+step)]
        second = utils[0] - 2. * utils[1] + utils[2]
        assert second < 0.
        assert second == pytest.approx(2. * coeffs.A * (1. - coeffs.A * consts.D) * step**2, rel=1e-6)


def test_ue_session_profit():
    """The vertex form agrees with the session utility and peaks at the unclamped best price."""
    coeffs = market_coefficients(4, 0.5)
    consts = SessionGameConstants(
        C=numpy.array([0., 0.24, 0.48]), D=7.2e-3, V=numpy.array([0.3, 0.1, 2.]), E_C=2.9e-3)
    best = ue_best_response_session(None, consts, coeffs, 0., clamp=False)

    prices = numpy.array([0.1, 0.35, 0.])
    rho_star, profits = ue_session_profit(prices, consts, coeffs)
    assert numpy.array_equal(rho_star, best)
    assert profits == pytest.approx(ue_session_utility(prices, prices, consts, coeffs), rel=1e-9)

    _, at_best = ue_session_profit(best, consts, coeffs)
    assert numpy.array_equal(at_best, ue_session_utility(best, best, consts, coeffs))

    others = numpy.array([0.2, 0.1, 0.])
    _, profits = ue_session_profit(prices, consts, coeffs, others)
    assert profits == pytest.approx(
        ue_session_utility(prices, prices+others, consts, coeffs), rel=1e-9)


def test_derived_mo_response_is_the_global_minimizer():
    """No perturbation of the derived response lowers the Taylor-form investment."""
    rng = numpy.random.default_rng(5)
    coeffs = market_coefficients(4, 0.5)
    prices = rng.uniform(0., 0.5, (4, 3))
    etas = rng.uniform(0.5, 2., 4)

    theta = mo_best_response(prices, coeffs, etas, "derived")
    best = mo_utility_taylor(prices, theta, coeffs, etas)

    for _ in range(100):
        direction = rng.normal(size=4)
        delta = direction / numpy.linalg.norm(direction) * rng.uniform(0.01, 0.1)
        assert mo_utility_taylor(prices, theta+delta, coeffs, etas) > best


def test_printed_mo_response_is_linear_in_prices():
    """Scaling every price scales the printed response."""
    rng = numpy.random.default_rng(9)
    coeffs = market_coefficients(4, 0.5)
    prices = rng.uniform(0., 0.5, (4, 3))
    base = mo_best_response(prices, coeffs, [1.]*4)

    for scale in (0.25, 0.5, 2., 8.):
        assert numpy.array_equal(mo_best_response(scale * prices, coeffs, [1.]*4), scale * base)

    for scale in rng.uniform(0.1, 10., 20):
        assert numpy.allclose(
            mo_best_response(scale * prices, coeffs, [1.]*4), scale * base, rtol=1e-12, atol=0.)
