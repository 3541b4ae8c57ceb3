#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Data models of solver trajectories, outcomes, and profit reports.
"""
import enum as _enum
from typing import Dict as _Dict
from typing import Tuple as _Tuple
from typing import Literal as _Literal
from typing import Optional as _Optional

import numpy as _numpy
from pydantic import validator as _validator
from pydantic import conint as _conint
from pydantic import confloat as _confloat
from pydantic import root_validator as _root_validator
from tlagame.utils.config import BaseConfig as _BaseConfig
from tlagame.utils.data.sessions import SessionEstimates as _SessionEstimates
from tlagame.utils.misc import as_readonly as _as_readonly

# alias to type hints
StatusTypeHint = _Optional[_Literal["feasible", "infeasible-contract"]]


def _as_table(v, dtype=float):
    """Convert to a read-only 2D array; an empty input becomes an empty table."""
    v = _as_readonly(v, dtype)
    if v.size == 0:
        v = _as_readonly(_numpy.zeros((0, 0), dtype=dtype), dtype)
    assert v.ndim == 2, f"expected a 2D table, got {v.ndim}D"
    return v


class SchemeId(str, _enum.Enum):
    """Pricing schemes of the comparison."""
    TLA_GTS = "TLA_GTS"
    PURE_GTS = "PURE_GTS"
    ILPS = "ILPS"


class IterationRecord(_BaseConfig):
    """One sweep of the best-response iteration.

    Attributes
    ----------
    iteration : int
        1-based sweep index.
    prices : 2D numpy.ndarray
        K-by-I_g prices after the sweep.
    theta : 1D numpy.ndarray
        The MO's purchases for these prices.
    grad_norms : 1D numpy.ndarray
        Per-UE gradient norms at these prices; values at or below the gradient floor are 0.
    clamped : 2D numpy.ndarray of bool
        Prices that were negative before clamping.
    theta_clamped : 1D numpy.ndarray of bool
        Purchases moved into the accounting range.
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    iteration: _conint(ge=1)
    prices: _numpy.ndarray
    theta: _numpy.ndarray
    grad_norms: _numpy.ndarray
    clamped: _numpy.ndarray
    theta_clamped: _numpy.ndarray

    @_validator("prices", pre=True)
    def _val_prices(cls, v):
        """Prices are non-negative."""
        v = _as_table(v)
        assert _numpy.all(v >= 0.), "prices must be non-negative"
        return v

    @_validator("clamped", pre=True)
    def _val_clamped(cls, v):
        """Convert to a read-only boolean table."""
        return _as_table(v, dtype=bool)

    @_validator("theta", pre=True)
    def _val_theta(cls, v):
        """Convert to a read-only array."""
        return _as_readonly(v)

    @_validator("theta_clamped", pre=True)
    def _val_theta_clamped(cls, v):
        """Convert to a read-only boolean array."""
        return _as_readonly(v, dtype=bool)

    @_validator("grad_norms", pre=True)
    def _val_grad_norms(cls, v):
        """Gradient norms are non-negative."""
        v = _as_readonly(v)
        assert _numpy.all(v >= 0.), "gradient norms must be non-negative"
        return v


class NeOutcome(_BaseConfig):
    """The result of a best-response run or of the UE-selection loop around it.

    Attributes
    ----------
    ue_ids : tuple of int
        The UEs in the game, in row order.
    converged : bool
        Whether the gradient-ratio rule held for every UE before the iteration cap.
    iterations : int
        Number of recorded sweeps.
    prices : 2D numpy.ndarray
        Final K-by-I_g prices.
    theta : 1D numpy.ndarray
        Final purchases, unclamped.
    theta_accounting : 1D numpy.ndarray
        Final purchases clamped into [theta floor, theta_max] for bookkeeping.
    theta_max : float or None
    profits, payments : 1D numpy.ndarray
        Per-UE profit and payment received under the true energy model.
    iterations_exact, iterations_taylor : 1D numpy.ndarray
        Per-UE local iterations at the accounting purchases by both counts.
    mo_cost : float
        The MO's total investment.
    residual : float
        Largest change of any price in one more sweep from the final prices.
    trajectory : tuple of IterationRecord
    cap_violators : tuple of int
        UEs whose accounting purchase needs more than f_max under the pricing view.
    eliminated_ues : tuple of int
        Removed UEs, in removal order.
    survivors : tuple of int
    status : str or None
        "feasible" or "infeasible-contract" after UE selection; None for a bare run.
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    ue_ids: _Tuple[_conint(ge=1), ...] = ()
    converged: bool = False
    iterations: _conint(ge=0) = 0
    prices: _numpy.ndarray = _numpy.zeros((0, 0))
    theta: _numpy.ndarray = _numpy.zeros(0)
    theta_accounting: _numpy.ndarray = _numpy.zeros(0)
    theta_max: _Optional[_confloat(gt=0., le=1.)] = None
    profits: _numpy.ndarray = _numpy.zeros(0)
    payments: _numpy.ndarray = _numpy.zeros(0)
    iterations_exact: _numpy.ndarray = _numpy.zeros(0)
    iterations_taylor: _numpy.ndarray = _numpy.zeros(0)
    mo_cost: float = 0.
    residual: _confloat(ge=0.) = 0.
    trajectory: _Tuple[IterationRecord, ...] = ()
    cap_violators: _Tuple[_conint(ge=1), ...] = ()
    eliminated_ues: _Tuple[_conint(ge=1), ...] = ()
    survivors: _Tuple[_conint(ge=1), ...] = ()
    status: StatusTypeHint = None

    @_validator("prices", pre=True, always=True)
    def _val_prices(cls, v):
        """Prices are non-negative."""
        v = _as_table(v)
        assert _numpy.all(v >= 0.), "prices must be non-negative"
        return v

    @_validator(
        "theta", "theta_accounting", "profits", "payments", "iterations_exact",
        "iterations_taylor", pre=True, always=True)
    def _val_vectors(cls, v):
        """Convert to a read-only array."""
        return _as_readonly(v)

    @_root_validator(pre=False, skip_on_failure=True)
    def _val_shapes(cls, values):
        """Validations that rely the existence of other fields."""
        K = len(values["ue_ids"])
        assert values["prices"].shape[0] == K, f"prices have {values['prices'].shape[0]} rows, expected {K}"
        for key in ("theta", "theta_accounting", "profits", "payments", "iterations_exact", "iterations_taylor"):
            assert values[key].size == K, f"{key} has {values[key].size} entries, expected {K}"
        assert values["iterations"] == len(values["trajectory"]), "iterations != trajectory length"
        assert set(values["survivors"]).isdisjoint(values["eliminated_ues"]), \
            "survivors and eliminated UEs overlap"
        return values

    @property
    def mo_payment(self):
        """Total payment of the MO to the UEs."""
        return float(self.payments.sum())


class ProfitReport(_BaseConfig):
    """Per-UE profits of one pricing scheme under the true energy model.

    Attributes
    ----------
    scheme : SchemeId
    ue_ids : tuple of int
        Every candidate UE; eliminated or unpaid UEs report 0.
    profits, payments : tuple of float
    mo_payment : float
    metadata : dict of str
        Scenario name, solver-config digest, prediction digest, and the MO's purchases at the
        scheme's prices as a JSON list.
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    scheme: SchemeId
    ue_ids: _Tuple[_conint(ge=1), ...] = ()
    profits: _Tuple[float, ...] = ()
    payments: _Tuple[float, ...] = ()
    mo_payment: float = 0.
    metadata: _Dict[str, str] = {}

    @_root_validator(pre=False, skip_on_failure=True)
    def _val_lengths(cls, values):
        """Validations that rely the existence of other fields."""
        K = len(values["ue_ids"])
        assert len(values["profits"]) == K and len(values["payments"]) == K, \
            "profits and payments must have one entry per UE"
        return values

    def profit_of(self, ue: int):
        """The profit of a UE by id."""
        return self.profits[self.ue_ids.index(ue)]


class ResultBundle(_BaseConfig):
    """Everything a simulation run emits.

    Attributes
    ----------
    ne : NeOutcome
    reports : tuple of ProfitReport
    predictions : tuple of tlagame.utils.data.SessionEstimates
        True-model estimates of every UE.
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    ne: NeOutcome
    reports: _Tuple[ProfitReport, ...] = ()
    predictions: _Tuple[_SessionEstimates, ...] = ()

    @_root_validator(pre=False, skip_on_failure=True)
    def _val_ids(cls, values):
        """Validations that rely the existence of other fields."""
        known = {est.ue for est in values["predictions"]}
        assert set(values["ne"].ue_ids) <= known or not values["predictions"], \
            "the outcome has UEs without prediction records"
        for report in values["reports"]:
            assert set(report.ue_ids) <= known or not values["predictions"], \
                f"report {report.scheme.value} has UEs without prediction records"
        return values
