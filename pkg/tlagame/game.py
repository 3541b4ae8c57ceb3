#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Utilities and closed-form best responses of the MO and the UEs.
"""
import logging as _logging
from typing import NamedTuple as _NamedTuple
from typing import Union as _Union

import numpy as _numpy
from scipy.linalg import solve as _solve
from scipy.linalg import LinAlgError as _LinAlgError
from pydantic import conint as _conint
from pydantic import confloat as _confloat
from pydantic import validator as _validator
from tlagame.costs import local_iterations as _local_iterations
from tlagame.costs import transmission_energy as _transmission_energy
from tlagame.utils.config import BaseConfig as _BaseConfig
from tlagame.utils.config import MoContract as _MoContract
from tlagame.utils.data.sessions import UeForecast as _UeForecast
from tlagame.utils.misc import as_readonly as _as_readonly
from tlagame.utils.errors import InvalidArgumentError as _InvalidArgumentError
from tlagame.utils.errors import ConfigurationError as _ConfigurationError

_logger = _logging.getLogger("tlagame.game")

# alias to type hints
ArrayLikeTypeHint = _Union[float, _numpy.ndarray]


class MarketCoefficients(_BaseConfig):
    """The constants A and B of the MO's response in a market of K UEs.

    Attributes
    ----------
    A, B : float
    K : int
    v : float
        Resource substitutability.
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    A: float
    B: float
    K: _conint(strict=True, ge=1)
    v: _confloat(ge=0., lt=1.)


class GameConstants(_BaseConfig):
    """What a UE treats as constants when it prices its sessions.

    Attributes
    ----------
    ue : int
    C : 1D numpy.ndarray
        2 * nu * c * |D| * f_ex of each session (J s).
    D : float
        nu * c**2 * |D|**2 / T_trn (J s^2).
    E_C : 1D numpy.ndarray
        Transmission energy of each session (J).
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    ue: _conint(ge=1)
    C: _numpy.ndarray
    D: _confloat(gt=0.)
    E_C: _numpy.ndarray

    @_validator("C", "E_C", pre=True)
    def _val_arrays(cls, v):
        """Convert to a read-only float array."""
        v = _as_readonly(v)
        assert _numpy.all(v >= 0.), "constants must be non-negative"
        return v


class SessionGameConstants(_NamedTuple):
    """C_t, D, V and E_C_t of one UE in one session; fields may also be arrays over sessions."""
    C: ArrayLikeTypeHint
    D: float
    V: ArrayLikeTypeHint
    E_C: ArrayLikeTypeHint


def market_coefficients(K: int, v: float):  # pylint: disable=invalid-name
    """A = -(1-2v+Kv) / ((1-v)(Kv+1-v)) and B = v / ((1-v)(Kv+1-v)).

    Returns
    -------
    MarketCoefficients
    """

    if K < 1:
        raise _InvalidArgumentError(f"the market needs at least one UE, got K = {K}")

    if not 0. <= v < 1.:
        raise _InvalidArgumentError(f"substitutability must be in [0, 1), got {v}")

    denominator = (1. - v) * (K * v + 1. - v)
    return MarketCoefficients(
        A=-(1.-2.*v+K*v)/denominator, B=v/denominator, K=K, v=v)


def get_game_constants(forecast: _UeForecast, contract: _MoContract, *, load_aware: bool = True):
    """Collect the pricing constants of one UE from its session prediction.

    Arguments
    ---------
    forecast : tlagame.utils.data.UeForecast
    contract : tlagame.utils.config.MoContract
    load_aware : bool
        False prices every session as if f_ex were 0 (hence C = 0).

    Returns
    -------
    GameConstants
    """
    prof = forecast.profile
    f_ex = forecast.prediction.f_ex if load_aware else _numpy.zeros_like(forecast.prediction.f_ex)

    return GameConstants(
        ue=prof.id,
        C=2. * prof.nu * prof.c * prof.dataset_size * f_ex,
        D=prof.nu * prof.c**2 * prof.dataset_size**2 / contract.T_trn,
        E_C=[_transmission_energy(contract, gain) for gain in forecast.prediction.gains.tolist()],
    )


def _quadratic(theta, v):
    """0.5 * (sum theta_k**2 + 2v * sum_{k<j} theta_k theta_j)."""
    squares = _numpy.dot(theta, theta)
    total = theta.sum()
    return 0.5 * (squares + v * (total**2 - squares))


def mo_utility(prices, theta, v: float, etas):
    """The MO's total investment with the exact local-iteration count.

    Arguments
    ---------
    prices : K-by-I_g array-like
    theta : length-K array-like
    v : float
        Resource substitutability.
    etas : length-K array-like

    Returns
    -------
    float
    """
    prices = _numpy.atleast_2d(_numpy.asarray(prices, dtype=float))
    theta = _numpy.asarray(theta, dtype=float)

    payment = 0.
    for total, theta_k, eta in zip(prices.sum(axis=1).tolist(), theta.tolist(), list(etas)):
        if total != 0.:  # a UE asking nothing is paid nothing whatever theta is
            payment += total * _local_iterations(theta_k, eta)

    return payment + _quadratic(theta, v)


def mo_utility_taylor(prices, theta, coeffs: MarketCoefficients, etas):
    """The MO's total investment with the Taylor count eta * (1 - theta)."""
    prices = _numpy.atleast_2d(_numpy.asarray(prices, dtype=float))
    theta = _numpy.asarray(theta, dtype=float)
    etas = _numpy.asarray(etas, dtype=float)

    payment = _numpy.dot(prices.sum(axis=1), etas * (1. - theta))
    return float(payment + _quadratic(theta, coeffs.v))


def mo_best_response(prices, coeffs: MarketCoefficients, etas, mode: str = "printed"):
    """The MO's purchase profile for given asked prices.

    Arguments
    ---------
    prices : K-by-I_g array-like
    coeffs : MarketCoefficients
    etas : length-K array-like
    mode : str
        "printed": theta_k = A * S_k + B * sum_{j!=k} S_j, with S_k the k-th row sum; needs every
        eta = 1. "derived": the solution of theta_k + v * sum_{j!=k} theta_j = eta_k * S_k.

    Returns
    -------
    1D numpy.ndarray of length K
    """
    prices = _numpy.atleast_2d(_numpy.asarray(prices, dtype=float))
    etas = _numpy.asarray(etas, dtype=float)
    sums = prices.sum(axis=1)

    if mode == "printed":
        if _numpy.any(etas != 1.):
            raise _ConfigurationError("the printed MO response requires eta = 1 for every UE")
        return coeffs.A * sums + coeffs.B * (sums.sum() - sums)

    if mode == "derived":
        mat = (1. - coeffs.v) * _numpy.eye(sums.size) + coeffs.v
        try:
            return _solve(mat, etas * sums, assume_a="sym")
        except _LinAlgError as err:
            raise _InvalidArgumentError(f"singular MO system at v = {coeffs.v}") from err

    raise _InvalidArgumentError(f"unknown MO response mode: {mode}")


def ue_utility(k: int, prices, estimates, iterations: float, forfeited=()):
    """A UE's total profit: sum_t (price_t * I_k - psi_t).

    The result is sum(payments) - sum(psi) rounded once, so U_k + sum(psi) == sum(payments) holds
    exactly only when that subtraction is exact, e.g. for sum(psi) / 2 <= sum(payments) <=
    2 * sum(psi); otherwise it holds to one rounding.

    Arguments
    ---------
    k : int
        Row of the UE in `prices`.
    prices : K-by-I_g array-like
    estimates : tlagame.utils.data.SessionEstimates
        Computed at the accuracy that produced `iterations`.
    iterations : float
    forfeited : sequence of int
        1-based sessions that are not paid.

    Returns
    -------
    float
    """
    payments = _numpy.atleast_2d(_numpy.asarray(prices, dtype=float))[k] * iterations
    if len(forfeited) > 0:
        payments[_numpy.asarray(forfeited, dtype=int)-1] = 0.
    return float(payments.sum() - estimates.psi.sum())


def ue_session_utility(rho_t, S, consts: SessionGameConstants, coeffs: MarketCoefficients):  # pylint: disable=invalid-name
    """The profit of a UE in one session as a function of its price.

    rho_t * X - C_t * X - (D * X**2 + E_C_t), with X = 1 + A * S - B * V.
    """
    factor = 1. + coeffs.A * S - coeffs.B * consts.V
    return rho_t * factor - consts.C * factor - (consts.D * factor**2 + consts.E_C)


def ue_best_response_session(
    t, consts: SessionGameConstants, coeffs: MarketCoefficients, other_session_prices,
    *, clamp: bool = True
):
    """The closed-form best price of a UE in session t.

    (1 - A C_t - B V - 2 A D + 2 A B D V) / (2 A**2 D - 2 A) - sum_{i!=t} price_i, clamped at 0.

    Arguments
    ---------
    t : int or None
        1-based session index selecting entries of array-valued constants; None evaluates every
        session at once.
    consts : SessionGameConstants
    coeffs : MarketCoefficients
    other_session_prices : float or array
        The UE's own prices summed over the other sessions.
    clamp : bool
        Replace negative prices by 0.

    Returns
    -------
    float or numpy.ndarray
    """
    A, B = coeffs.A, coeffs.B  # pylint: disable=invalid-name
    denominator = 2. * A**2 * consts.D - 2. * A

    if A == 0. or denominator == 0.:
        raise _InvalidArgumentError(f"degenerate market: A = {A}, A * D = {A*consts.D}")

    C, V, others = consts.C, consts.V, other_session_prices  # pylint: disable=invalid-name
    if t is not None:
        C, V, others = (  # pylint: disable=invalid-name
            val[t-1] if _numpy.ndim(val) > 0 else val for val in (C, V, others))

    D = consts.D  # pylint: disable=invalid-name
    price = (1. - A * C - B * V - 2. * A * D + 2. * A * B * D * V) / denominator - others

    if clamp:
        price = _numpy.maximum(price, 0.) if _numpy.ndim(price) > 0 else max(price, 0.)
    return price


def ue_session_profit(
    prices, consts: SessionGameConstants, coeffs: MarketCoefficients, other_session_prices=0.
):
    """Per-session profits of a UE, written around its unclamped best price rho*.

    The session utility is quadratic in the price with curvature 2 * A * (1 - A * D) < 0, so
    u(rho) = u(rho*) + A * (1 - A * D) * (rho - rho*)**2. Profits are then ordered exactly as the
    prices' distances to rho*.

    Arguments
    ---------
    prices : float or array
        The UE's price in every session; same shape as the array-valued constants.
    consts : SessionGameConstants
    coeffs : MarketCoefficients
    other_session_prices : float or array
        The UE's own prices summed over the other sessions.

    Returns
    -------
    best, profits : numpy.ndarray
    """
    best = _numpy.asarray(
        ue_best_response_session(None, consts, coeffs, other_session_prices, clamp=False))
    peak = ue_session_utility(best, best + other_session_prices, consts, coeffs)
    curvature = coeffs.A * (1. - coeffs.A * consts.D)
    return best, peak + curvature * (_numpy.asarray(prices, dtype=float) - best)**2
