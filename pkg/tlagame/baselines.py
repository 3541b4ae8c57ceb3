#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Comparison schemes and the profit-comparison harness.
"""
import json as _json
import logging as _logging
from typing import Sequence as _Sequence
from typing import Tuple as _Tuple

import numpy as _numpy
from pydantic import confloat as _confloat
from tlagame.costs import theta_max as _theta_max
from tlagame.costs import session_costs as _session_costs
from tlagame.game import SessionGameConstants as _SessionGameConstants
from tlagame.game import market_coefficients as _market_coefficients
from tlagame.game import get_game_constants as _get_game_constants
from tlagame.game import mo_best_response as _mo_best_response
from tlagame.game import ue_best_response_session as _ue_best_response_session
from tlagame.game import ue_session_profit as _ue_session_profit
from tlagame.solver import tla_gts as _tla_gts
from tlagame.utils.config import BaseConfig as _BaseConfig
from tlagame.utils.config import Scenario as _Scenario
from tlagame.utils.config import MoContract as _MoContract
from tlagame.utils.config import SolverConfig as _SolverConfig
from tlagame.utils.data.sessions import UeForecast as _UeForecast
from tlagame.utils.data.sessions import get_forecasts as _get_forecasts
from tlagame.utils.data.outcome import SchemeId
from tlagame.utils.data.outcome import ProfitReport as _ProfitReport
from tlagame.utils.errors import TLAGameError as _TLAGameError
from tlagame.utils.errors import InvalidArgumentError as _InvalidArgumentError
from tlagame.utils.misc import get_digest as _get_digest

_logger = _logging.getLogger("tlagame.baselines")


def pure_gts(ues: _Sequence[_UeForecast], contract: _MoContract, config: _SolverConfig):
    """The same game and UE selection with every UE pricing as if its EX load were 0.

    Profits in the returned outcome still use the true, EX-load-aware energies.
    """
    return _tla_gts(ues, contract, config, load_aware=False)


def ilps(ues: _Sequence[_UeForecast], contract: _MoContract, markup: float = 0.1, *, taylor=True):
    """Cost-plus prices (1 + markup) * psi_t / I_k, each UE on its own.

    Costs are estimated with the true EX load at the reference accuracy theta_max / 2.

    Returns
    -------
    K-by-I_g numpy.ndarray
    """

    if markup < 0.:
        raise _InvalidArgumentError(f"markup must be non-negative, got {markup}")

    theta_ref = _theta_max(contract.epsilon, contract.zeta, contract.I_g) / 2.
    prices = _numpy.zeros((len(ues), contract.I_g))

    for k, fcst in enumerate(ues):
        est = _session_costs(
            fcst.profile, contract, fcst.prediction, theta_ref, taylor=taylor, enforce_cap=False)
        if est.iterations > 0.:
            prices[k] = (1. + markup) * est.psi / est.iterations

    return prices


class AccuracyComparison(_BaseConfig):
    """The three schemes at one global accuracy.

    Attributes
    ----------
    epsilon : float
    reports : tuple of tlagame.utils.data.ProfitReport
        In the order TLA_GTS, PURE_GTS, ILPS.
    """
    # pylint: disable=too-few-public-methods

    epsilon: _confloat(gt=0., le=1.)
    reports: _Tuple[_ProfitReport, ...] = ()


def _report(scheme, ids, profits, payments, metadata):
    """Assemble a ProfitReport listing every candidate UE."""
    profits = [float(profits.get(ue, 0.)) for ue in ids]
    payments = [float(payments.get(ue, 0.)) for ue in ids]
    return _ProfitReport(
        scheme=scheme, ue_ids=ids, profits=profits, payments=payments,
        mo_payment=sum(payments), metadata=metadata)


def _labelled(scheme, func, *args, **kwargs):
    """Call func and prefix the message of a TLAGameError with the scheme name."""
    try:
        return func(*args, **kwargs)
    except _TLAGameError as err:
        err.args = (f"{scheme.value}: {err}",) + err.args[1:]
        raise


def _market_views(market, prices, contract, coupling):
    """Session constants of every UE in the market with rivals fixed at the given prices.

    Returns
    -------
    A list of (true constants, load-blind constants, own prices in the other sessions).
    """
    views = []
    for k, fcst in enumerate(market):
        own = prices[k]
        if coupling == "session":
            V, others = prices.sum(axis=0) - own, _numpy.zeros_like(own)  # pylint: disable=invalid-name
        elif coupling == "aggregate":
            V, others = prices.sum() - own.sum(), own.sum() - own  # pylint: disable=invalid-name
        else:
            raise _InvalidArgumentError(f"unknown coupling: {coupling}")

        true, blind = (
            _get_game_constants(fcst, contract, load_aware=aware) for aware in (True, False))
        views.append((
            _SessionGameConstants(C=true.C, D=true.D, V=V, E_C=true.E_C),
            _SessionGameConstants(C=blind.C, D=blind.D, V=V, E_C=blind.E_C),
            others,
        ))
    return views


def _scheme_prices(scheme, market, views, coeffs, contract, config):
    """Each market UE's session prices under a scheme, rivals held at the reference."""

    if scheme == SchemeId.ILPS:
        return ilps(market, contract, config.markup, taylor=config.counting == "taylor")

    rows = [
        _ue_best_response_session(
            None, true if scheme == SchemeId.TLA_GTS else blind, coeffs, others)
        for true, blind, others in views
    ]
    return _numpy.array(rows, dtype=float).reshape(len(market), contract.I_g)


def compare_schemes(
    scenario: _Scenario, config: _SolverConfig = None, forecasts=None, contract: _MoContract = None
):
    """Run TLA-GTS, pure-GTS and ILPS on the same predictions and the same market.

    The market is the TLA-GTS outcome: its surviving UEs and their equilibrium prices. Each
    surviving UE then prices its sessions by each scheme against the others' equilibrium prices
    and is paid rho_t * X_t for the resulting demand X_t = 1 + A * S - B * V. Its profit is the
    session utility under the true, EX-load-aware energies. TLA-GTS prices at the true best
    response, pure-GTS at the best response with f_ex = 0, ILPS at its cost-plus quote. Hence
    TLA-GTS >= pure-GTS for every UE, and pure-GTS >= ILPS wherever the quotes lie below the
    load-blind prices. Eliminated UEs report 0 under every scheme.

    Arguments
    ---------
    scenario : tlagame.utils.config.Scenario
    config : tlagame.utils.config.SolverConfig or None
        Defaults to `scenario.solver`.
    forecasts : tuple of tlagame.utils.data.UeForecast or None
        Shared by the three schemes; built from the scenario when None.
    contract : tlagame.utils.config.MoContract or None
        Defaults to `scenario.contract`.

    Returns
    -------
    A list of three tlagame.utils.data.ProfitReport, in the order TLA_GTS, PURE_GTS, ILPS. The
    metadata of each carries the MO's purchases at the scheme's prices as a JSON list.
    """
    config = scenario.solver if config is None else config
    contract = scenario.contract if contract is None else contract
    forecasts = _get_forecasts(scenario) if forecasts is None else tuple(forecasts)

    if len(forecasts) == 0:
        return []

    ids = tuple(fcst.id for fcst in forecasts)
    metadata = {
        "scenario": scenario.name,
        "config": config.digest(),
        "predictions": _get_digest(*(fcst.prediction.digest() for fcst in forecasts)),
    }

    outcome = _labelled(SchemeId.TLA_GTS, _tla_gts, forecasts, contract, config)
    market = [fcst for fcst in forecasts if fcst.id in outcome.survivors]

    if market:
        coeffs = _market_coefficients(len(market), contract.v)
        views = _market_views(market, outcome.prices, contract, config.coupling)
        etas = [fcst.profile.eta for fcst in market]

    reports = []
    for scheme in SchemeId:
        profits, payments, theta = {}, {}, []

        if market:
            prices = _labelled(scheme, _scheme_prices, scheme, market, views, coeffs, contract, config)
            theta = _labelled(scheme, _mo_best_response, prices, coeffs, etas, config.mode).tolist()

            for fcst, row, (true, _, others) in zip(market, prices, views):
                _, session_profits = _ue_session_profit(row, true, coeffs, others)
                demand = 1. + coeffs.A * (row + others) - coeffs.B * true.V
                profits[fcst.id] = float(session_profits.sum())
                payments[fcst.id] = float((row * demand).sum())

        reports.append(_report(
            scheme, ids, profits, payments, dict(metadata, purchases=_json.dumps(theta))))
        _logger.info("%s: MO pays %.6g in total", scheme.value, reports[-1].mo_payment)

    return reports


def compare_accuracies(
    scenario: _Scenario, epsilons: _Sequence[float], config: _SolverConfig = None, forecasts=None
):
    """Run the scheme comparison at each global accuracy with the rest of the contract unchanged.

    Returns
    -------
    A list of AccuracyComparison, one per epsilon. An unattainable accuracy leaves no market, so
    every UE reports 0 there.
    """
    forecasts = _get_forecasts(scenario) if forecasts is None else tuple(forecasts)

    points = []
    for epsilon in epsilons:
        relaxed = scenario.contract.copy(update={"epsilon": float(epsilon)})
        relaxed.check()

        reports = compare_schemes(scenario, config, forecasts, relaxed)
        points.append(AccuracyComparison(epsilon=epsilon, reports=reports))
        _logger.info("epsilon = %g: compared %d schemes", epsilon, len(reports))

    return points
