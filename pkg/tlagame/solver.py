#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""The best-response NE finder, the UE-selection loop, and verification oracles.
"""
import math as _math
import logging as _logging
from typing import Sequence as _Sequence
from typing import Optional as _Optional
from typing import Tuple as _Tuple

import numpy as _numpy
from pydantic import confloat as _confloat
from tlagame.costs import theta_max as _theta_max
from tlagame.costs import local_iterations as _local_iterations
from tlagame.costs import local_iterations_taylor as _local_iterations_taylor
from tlagame.costs import session_costs as _session_costs
from tlagame.game import GameConstants as _GameConstants
from tlagame.game import SessionGameConstants as _SessionGameConstants
from tlagame.game import MarketCoefficients as _MarketCoefficients
from tlagame.game import market_coefficients as _market_coefficients
from tlagame.game import get_game_constants as _get_game_constants
from tlagame.game import mo_best_response as _mo_best_response
from tlagame.game import mo_utility as _mo_utility
from tlagame.game import mo_utility_taylor as _mo_utility_taylor
from tlagame.game import ue_best_response_session as _ue_best_response_session
from tlagame.utils.config import BaseConfig as _BaseConfig
from tlagame.utils.config import MoContract as _MoContract
from tlagame.utils.config import SolverConfig as _SolverConfig
from tlagame.utils.data.sessions import UeForecast as _UeForecast
from tlagame.utils.data.outcome import IterationRecord as _IterationRecord
from tlagame.utils.data.outcome import NeOutcome as _NeOutcome
from tlagame.utils.data.outcome import StatusTypeHint as _StatusTypeHint
from tlagame.utils.errors import InvalidArgumentError as _InvalidArgumentError
from tlagame.utils.errors import InfeasibleContractError as _InfeasibleContractError
from tlagame.utils.errors import ConfigurationError as _ConfigurationError
from tlagame.utils.errors import OracleFailureError as _OracleFailureError

_logger = _logging.getLogger("tlagame.solver")

PHI_RATIO = 2. / (1. + _math.sqrt(5.))


class SweepPoint(_BaseConfig):
    """TLA-GTS at one global accuracy.

    Attributes
    ----------
    epsilon : float
    theta_max : float or None
        None when the accuracy cannot be reached at all.
    status : str
    survivors : tuple of int
    mo_payment : float
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    epsilon: _confloat(gt=0., le=1.)
    theta_max: _Optional[float] = None
    status: _StatusTypeHint = None
    survivors: _Tuple[int, ...] = ()
    mo_payment: float = 0.


def gradient_ue(k: int, prices, consts: _GameConstants, coeffs: _MarketCoefficients, coupling="session"):
    """Partial derivatives of a UE's summed session utilities with respect to its own prices.

    Arguments
    ---------
    k : int
        Row of the UE in `prices`.
    prices : K-by-I_g array-like
    consts : tlagame.game.GameConstants
        The constants of UE k.
    coeffs : tlagame.game.MarketCoefficients
    coupling : str
        "session": session t only sees its own price and V_t = sum_{x!=k} price_{x,t}.
        "aggregate": every session shares S = sum_t price_{k,t} and V = sum_{x!=k} sum_t price_{x,t}.

    Returns
    -------
    1D numpy.ndarray of length I_g
    """
    prices = _numpy.atleast_2d(_numpy.asarray(prices, dtype=float))
    A, B, D = coeffs.A, coeffs.B, consts.D  # pylint: disable=invalid-name
    own = prices[k]

    if coupling == "session":
        others = prices.sum(axis=0) - own
        factor = 1. + A * own - B * others
        return factor + A * own - A * consts.C - 2. * A * D * factor

    if coupling == "aggregate":
        total = own.sum()
        factor = 1. + A * total - B * (prices.sum() - total)
        grad = factor + A * total - A * consts.C.sum() - 2. * A * D * factor * own.size
        return _numpy.full(own.size, grad)

    raise _InvalidArgumentError(f"unknown coupling: {coupling}")


def _sweep(prices, consts, coeffs, coupling):
    """One Jacobi sweep of every UE's closed-form response from the same snapshot.

    Returns
    -------
    new_prices, clamped : 2D numpy.ndarray
    """
    new = _numpy.empty_like(prices)

    for k, const in enumerate(consts):
        own = prices[k]
        if coupling == "session":
            V = prices.sum(axis=0) - own  # pylint: disable=invalid-name
            others = 0.
        elif coupling == "aggregate":
            V = prices.sum() - own.sum()  # pylint: disable=invalid-name
            others = own.sum() - own
        else:
            raise _InvalidArgumentError(f"unknown coupling: {coupling}")

        session_consts = _SessionGameConstants(C=const.C, D=const.D, V=V, E_C=const.E_C)
        new[k] = _ue_best_response_session(None, session_consts, coeffs, others, clamp=False)

    clamped = new < 0.
    return _numpy.maximum(new, 0.), clamped


def _accounting_theta(theta, thmax, floor):
    """Clamp purchases into [floor, min(theta_max, 1 - floor)]; flag the moved ones."""
    clamped = _numpy.clip(theta, floor, min(thmax, 1.-floor))
    return clamped, clamped != theta


def _count(theta, eta, counting):
    """Local iterations by the configured count."""
    if counting == "taylor":
        return _local_iterations_taylor(theta, eta)
    return _local_iterations(theta, eta)


def _initial_prices(forecasts, contract, config, thmax, load_aware):
    """Starting prices of the iteration."""
    K, I_g = len(forecasts), contract.I_g  # pylint: disable=invalid-name
    pricing = config.initial_pricing

    if pricing == "zeros":
        return _numpy.zeros((K, I_g))

    if pricing == "break_even":
        theta0 = thmax / 2.
        prices = _numpy.empty((K, I_g))
        for k, fcst in enumerate(forecasts):
            est = _session_costs(
                fcst.profile, contract, fcst.prediction, theta0, taylor=config.counting == "taylor",
                enforce_cap=False, load_aware=load_aware)
            prices[k] = est.psi / est.iterations if est.iterations > 0. else 0.
        return prices

    prices = _numpy.array(pricing, dtype=float)
    if prices.shape != (K, I_g):
        raise _ConfigurationError(f"explicit initial prices must be {K}x{I_g}, got {prices.shape}")
    return prices


def settle(forecasts, contract, config, prices, theta_accounting, *, pricing_view_load_aware=True):
    """Profits under the true energy model and cap violators under the pricing view.

    A session whose true load cannot admit the task at the purchased accuracy is not paid; its
    energy is still charged.

    Returns
    -------
    profits, payments, iters_exact, iters_taylor : 1D numpy.ndarray
    cap_violators : tuple of int
    estimates : tuple of tlagame.utils.data.SessionEstimates
        True-model estimates.
    """
    K = len(forecasts)  # pylint: disable=invalid-name
    taylor = config.counting == "taylor"
    profits, payments = _numpy.zeros(K), _numpy.zeros(K)
    iters_exact, iters_taylor = _numpy.zeros(K), _numpy.zeros(K)
    violators, estimates = [], []

    for k, fcst in enumerate(forecasts):
        theta = float(theta_accounting[k])
        true = _session_costs(
            fcst.profile, contract, fcst.prediction, theta, taylor=taylor, enforce_cap=False)

        view = true
        if not pricing_view_load_aware:
            view = _session_costs(
                fcst.profile, contract, fcst.prediction, theta, taylor=taylor, enforce_cap=False,
                load_aware=False)

        if view.cap_violations:
            violators.append(fcst.id)

        paid = _numpy.array(prices[k], dtype=float) * true.iterations
        if true.cap_violations:
            paid[_numpy.asarray(true.cap_violations)-1] = 0.

        payments[k] = paid.sum()
        profits[k] = payments[k] - true.psi.sum()
        iters_exact[k] = _local_iterations(theta, fcst.profile.eta)
        iters_taylor[k] = _local_iterations_taylor(theta, fcst.profile.eta)
        estimates.append(true)

    return profits, payments, iters_exact, iters_taylor, tuple(violators), tuple(estimates)


def find_ne(
    forecasts: _Sequence[_UeForecast], contract: _MoContract, config: _SolverConfig,
    *, load_aware: bool = True
):
    """Iterate best responses until the gradient-ratio rule holds for every UE.

    Every sweep updates all UEs from the same price snapshot, then the MO responds. From the
    second sweep on, the run stops when ||grad U_k||[i] <= xi * ||grad U_k||[i-1] for all k.

    Arguments
    ---------
    forecasts : sequence of tlagame.utils.data.UeForecast
    contract : tlagame.utils.config.MoContract
    config : tlagame.utils.config.SolverConfig
    load_aware : bool
        False prices every session as if the EX load were 0; profits still use the true model.

    Returns
    -------
    tlagame.utils.data.NeOutcome
        `converged` is False when the iteration cap is hit.
    """

    if len(forecasts) == 0:
        raise _InvalidArgumentError("find_ne needs at least one UE")

    K = len(forecasts)  # pylint: disable=invalid-name
    coeffs = _market_coefficients(K, contract.v)
    etas = _numpy.array([fcst.profile.eta for fcst in forecasts])
    thmax = _theta_max(contract.epsilon, contract.zeta, contract.I_g)

    if config.mode == "printed" and _numpy.any(etas != 1.):
        raise _ConfigurationError("the printed MO response requires eta = 1 for every UE")

    consts = [_get_game_constants(fcst, contract, load_aware=load_aware) for fcst in forecasts]
    prices = _initial_prices(forecasts, contract, config, thmax, load_aware)

    trajectory = []
    converged = False
    previous = None

    for i in range(1, config.max_iters+1):
        prices, clamped = _sweep(prices, consts, coeffs, config.coupling)
        theta = _mo_best_response(prices, coeffs, etas, config.mode)
        acct, acct_flags = _accounting_theta(theta, thmax, config.theta_floor)

        norms = _numpy.array([
            _numpy.linalg.norm(gradient_ue(k, prices, const, coeffs, config.coupling))
            for k, const in enumerate(consts)
        ])
        norms[norms <= config.gtol] = 0.

        trajectory.append(_IterationRecord(
            iteration=i, prices=prices, theta=theta, grad_norms=norms, clamped=clamped,
            theta_clamped=acct_flags))

        _logger.debug("Sweep %d: gradient norms %s", i, norms.tolist())
        if clamped.any():
            _logger.debug("Sweep %d: %d prices clamped at 0", i, int(clamped.sum()))

        if previous is not None and _numpy.all(norms <= config.xi * previous):
            converged = True
            break

        previous = norms

    if converged:
        _logger.info("Converged after %d sweeps", len(trajectory))
    else:
        _logger.warning("Hit the cap of %d sweeps without convergence", config.max_iters)

    if acct_flags.any():
        _logger.warning(
            "Purchases of UEs %s clamped into [%g, %g] for accounting",
            [fcst.id for fcst, flag in zip(forecasts, acct_flags) if flag],
            config.theta_floor, thmax)

    residual = float(_numpy.abs(_sweep(prices, consts, coeffs, config.coupling)[0] - prices).max())

    profits, payments, iters_exact, iters_taylor, violators, _ = settle(
        forecasts, contract, config, prices, acct, pricing_view_load_aware=load_aware)

    if config.counting == "taylor":
        mo_cost = _mo_utility_taylor(prices, acct, coeffs, etas)
    else:
        mo_cost = _mo_utility(prices, acct, contract.v, etas)

    return _NeOutcome(
        ue_ids=tuple(fcst.id for fcst in forecasts),
        converged=converged,
        iterations=len(trajectory),
        prices=prices,
        theta=theta,
        theta_accounting=acct,
        theta_max=thmax,
        profits=profits,
        payments=payments,
        iterations_exact=iters_exact,
        iterations_taylor=iters_taylor,
        mo_cost=mo_cost,
        residual=residual,
        trajectory=tuple(trajectory),
        cap_violators=violators,
        survivors=tuple(fcst.id for fcst in forecasts),
    )


def check_feasibility(theta, theta_max: float):  # pylint: disable=redefined-outer-name
    """Flag purchases outside (0, theta_max].

    Returns
    -------
    A list of "ok" or "violates", one per UE.
    """
    return ["ok" if 0. < val <= theta_max else "violates" for val in _numpy.asarray(theta).tolist()]


def _empty_outcome(contract, eliminated, thmax=None):
    """An infeasible-contract outcome without any UE."""
    return _NeOutcome(
        prices=_numpy.zeros((0, contract.I_g)), theta_max=thmax, eliminated_ues=tuple(eliminated),
        survivors=(), status="infeasible-contract", converged=False)


def tla_gts(
    candidates: _Sequence[_UeForecast], contract: _MoContract, config: _SolverConfig,
    *, load_aware: bool = True
):
    """Solve the game and remove infeasible UEs one at a time until the rest are feasible.

    In each round, the violators are the UEs with a purchase outside (0, theta_max] and the UEs
    that cannot admit the task under the pricing view. The violator asking the highest total
    price leaves (ties go to the lowest id), and the game is solved again.

    Returns
    -------
    tlagame.utils.data.NeOutcome
        The last round's outcome with `status`, `eliminated_ues` and `survivors` set. An empty
        candidate set or an unattainable accuracy gives an empty infeasible-contract outcome.
    """

    try:
        thmax = _theta_max(contract.epsilon, contract.zeta, contract.I_g)
    except _InfeasibleContractError as err:
        _logger.info("Infeasible contract: %s", err)
        return _empty_outcome(contract, [])

    remaining = list(candidates)
    eliminated = []

    while remaining:
        outcome = find_ne(remaining, contract, config, load_aware=load_aware)
        flags = check_feasibility(outcome.theta, thmax)

        violators = [
            k for k, (fcst, flag) in enumerate(zip(remaining, flags))
            if flag == "violates" or fcst.id in outcome.cap_violators
        ]

        if not violators:
            _logger.info("Feasible with UEs %s", list(outcome.ue_ids))
            return outcome.copy(update={
                "status": "feasible", "eliminated_ues": tuple(eliminated),
                "survivors": outcome.ue_ids})

        totals = outcome.prices.sum(axis=1)
        pick = max(violators, key=lambda k: (totals[k], -remaining[k].id))
        _logger.info(
            "Removing UE %d (total price %.6g, theta %.6g)",
            remaining[pick].id, totals[pick], outcome.theta[pick])

        eliminated.append(remaining.pop(pick).id)

    _logger.info("No UE left; the MO needs to lower the performance metrics")
    return _empty_outcome(contract, eliminated, thmax)


def numeric_price_oracle(objective, lo: float, hi: float, tol: float = 1e-9, max_iters: int = 500):
    """Golden-section search for the maximizer of a unimodal function on [lo, hi].

    Raises
    ------
    OracleFailureError
        If the objective returns a non-finite value.
    """

    if not lo < hi:
        raise _InvalidArgumentError(f"need lo < hi, got {lo} and {hi}")

    def _eval(x):
        val = objective(x)
        if not _math.isfinite(val):
            raise _OracleFailureError(f"objective is not finite at {x}: {val}")
        return val

    x1 = hi - PHI_RATIO * (hi - lo)
    x2 = lo + PHI_RATIO * (hi - lo)
    f1, f2 = _eval(x1), _eval(x2)

    for _ in range(max_iters):
        if hi - lo <= tol:
            break

        if f1 > f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - PHI_RATIO * (hi - lo)
            f1 = _eval(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + PHI_RATIO * (hi - lo)
            f2 = _eval(x2)

    return 0.5 * (lo + hi)


def numeric_mo_oracle(prices, coeffs: _MarketCoefficients, etas):
    """Minimize the MO's Taylor-form investment through the closed-form inverse of its FOC.

    The FOC matrix (1-v) I + v 11^T has the inverse (I - v / (1-v+Kv) 11^T) / (1-v).
    """
    prices = _numpy.atleast_2d(_numpy.asarray(prices, dtype=float))
    rhs = _numpy.asarray(etas, dtype=float) * prices.sum(axis=1)
    v = coeffs.v
    scale = 1. - v + rhs.size * v

    if 1. - v == 0. or scale == 0.:
        raise _OracleFailureError(f"singular MO system at v = {v}")

    return (rhs - v / scale * rhs.sum()) / (1. - v)


def sweep_accuracy(
    forecasts: _Sequence[_UeForecast], contract: _MoContract, config: _SolverConfig,
    epsilons: _Sequence[float], *, load_aware: bool = True
):
    """Run TLA-GTS at each global accuracy with the rest of the contract unchanged.

    Returns
    -------
    A list of SweepPoint.
    """
    points = []
    for epsilon in epsilons:
        relaxed = contract.copy(update={"epsilon": float(epsilon)})
        relaxed.check()

        try:
            thmax = _theta_max(relaxed.epsilon, relaxed.zeta, relaxed.I_g)
        except _InfeasibleContractError:
            thmax = None

        outcome = tla_gts(forecasts, relaxed, config, load_aware=load_aware)
        points.append(SweepPoint(
            epsilon=epsilon, theta_max=thmax, status=outcome.status, survivors=outcome.survivors,
            mo_payment=outcome.mo_payment))
        _logger.info("epsilon = %g: %s with %d UEs", epsilon, outcome.status, len(outcome.survivors))

    return points
