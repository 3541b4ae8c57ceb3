#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Data models of per-session predictions and energy estimates.
"""
from __future__ import annotations as _annotations  # allows us not using quotation marks for hints
from typing import TYPE_CHECKING as _TYPE_CHECKING  # indicates if we have type checking right now
if _TYPE_CHECKING:  # if we are having type checking, then we import corresponding classes/types
    from tlagame.utils.config import Scenario

# pylint: disable=wrong-import-position, ungrouped-imports
import logging as _logging
from typing import Tuple as _Tuple

import numpy as _numpy
from pydantic import validator as _validator
from pydantic import conint as _conint
from pydantic import confloat as _confloat
from pydantic import root_validator as _root_validator
from tlagame.utils.config import BaseConfig as _BaseConfig
from tlagame.utils.misc import as_readonly as _as_readonly
from tlagame.utils.misc import get_digest as _get_digest
from tlagame.utils.config import UeProfile as _UeProfile
from tlagame.utils.data.chains import MarkovChain as _MarkovChain
from tlagame.utils.data.chains import get_chain as _get_chain
from tlagame.utils.data.chains import get_channel as _get_channel

_logger = _logging.getLogger("tlagame.utils.data.sessions")


class SessionPrediction(_BaseConfig):
    """Predicted EX-load and channel states of one UE over the global sessions.

    Attributes
    ----------
    ue : int
        The UE id.
    load_states : 1D numpy.ndarray of int
        Predicted load state of each session t = 1..I_g.
    f_ex : 1D numpy.ndarray
        The load levels (Hz) of these states.
    gain_states : 1D numpy.ndarray of int
        Predicted gain state of each parameter transmission.
    gains : 1D numpy.ndarray
        The gain levels of these states.
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    ue: _conint(ge=1)
    load_states: _numpy.ndarray
    f_ex: _numpy.ndarray
    gain_states: _numpy.ndarray
    gains: _numpy.ndarray

    @_validator("load_states", "gain_states", pre=True)
    def _val_states(cls, v):
        """Convert to a read-only integer array."""
        return _as_readonly(v, dtype=int)

    @_validator("f_ex", "gains", pre=True)
    def _val_levels(cls, v):
        """Convert to a read-only float array."""
        return _as_readonly(v)

    @_root_validator(pre=False, skip_on_failure=True)
    def _val_lengths(cls, values):
        """Validations that rely the existence of other fields."""
        sessions = values["load_states"].size
        for key in ("f_ex", "gain_states", "gains"):
            assert values[key].size == sessions, f"{key} has {values[key].size} sessions, expected {sessions}"
        assert _numpy.all(values["f_ex"] >= 0.), "EX loads must be non-negative"
        assert _numpy.all(values["gains"] > 0.), "channel gains must be positive"
        return values

    @property
    def sessions(self):
        """Number of global sessions."""
        return self.load_states.size

    def digest(self):
        """A short hash of the prediction record."""
        return _get_digest(self.ue, self.load_states, self.f_ex, self.gain_states, self.gains)


class SessionEstimates(_BaseConfig):
    """Per-session energy estimates of one UE at a given local accuracy.

    Attributes
    ----------
    ue : int
    theta : float
        The local accuracy the estimates were computed at.
    iterations : float
        Local iterations I_k per session at theta.
    f_k : float
        The extra CPU frequency (Hz) the FL task needs.
    load_states, f_ex, gain_states, gains : 1D numpy.ndarray
        Copied from the prediction.
    E_F, E_C, psi : 1D numpy.ndarray
        Training, transmission, and overall energy (J) of each session; psi = E_F + E_C.
    cap_violations : tuple of int
        1-based sessions where f_ex + f_k exceeds f_max.
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    ue: _conint(ge=1)
    theta: _confloat(gt=0., le=1.)
    iterations: _confloat(ge=0.)
    f_k: _confloat(ge=0.)
    load_states: _numpy.ndarray
    f_ex: _numpy.ndarray
    gain_states: _numpy.ndarray
    gains: _numpy.ndarray
    E_F: _numpy.ndarray
    E_C: _numpy.ndarray
    psi: _numpy.ndarray
    cap_violations: _Tuple[_conint(ge=1), ...] = ()

    @_validator("load_states", "gain_states", pre=True)
    def _val_states(cls, v):
        """Convert to a read-only integer array."""
        return _as_readonly(v, dtype=int)

    @_validator("f_ex", "gains", "E_F", "E_C", "psi", pre=True)
    def _val_floats(cls, v):
        """Convert to a read-only float array."""
        return _as_readonly(v)

    @_root_validator(pre=False, skip_on_failure=True)
    def _val_energies(cls, values):
        """Validations that rely the existence of other fields."""
        assert _numpy.all(values["E_F"] >= 0.), "training energies must be non-negative"
        assert _numpy.all(values["E_C"] > 0.), "transmission energies must be positive"
        assert _numpy.array_equal(values["psi"], values["E_F"]+values["E_C"]), "psi != E_F + E_C"
        return values

    @property
    def sessions(self):
        """Number of global sessions."""
        return self.psi.size


class UeForecast(_BaseConfig):
    """A UE's profile together with its built load chain and its session prediction.

    Attributes
    ----------
    profile : tlagame.utils.config.UeProfile
    load_chain : tlagame.utils.data.MarkovChain
    prediction : SessionPrediction
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    profile: _UeProfile
    load_chain: _MarkovChain
    prediction: SessionPrediction

    @_root_validator(pre=False, skip_on_failure=True)
    def _val_ids(cls, values):
        """Validations that rely the existence of other fields."""
        assert values["profile"].id == values["prediction"].ue, "profile and prediction differ in UE id"
        return values

    @property
    def id(self):  # pylint: disable=invalid-name
        """The UE id."""
        return self.profile.id


def get_forecasts(scenario: Scenario):
    """Build the chains of a scenario and predict every UE's sessions.

    The channel chain and its initial distribution are shared by all UEs.

    Arguments
    ---------
    scenario : tlagame.utils.config.Scenario

    Returns
    -------
    A tuple of UeForecast, in the order of `scenario.ues`.
    """
    from tlagame.costs import predict_sessions  # pylint: disable=import-outside-toplevel

    contract = scenario.contract
    channel, pi0 = _get_channel(scenario.channel, scenario.channel.slots * contract.Tc)
    _logger.info("Built the channel chain with %d gain levels", channel.count)

    forecasts = []
    for profile in scenario.ues:
        config = profile.load_chain
        if config.trace is not None and config.window is None:
            config = config.copy(update={"window": contract.I_g * (contract.T_trn + contract.T_com)})

        chain = _get_chain("load", 0., profile.f_max, profile.levels, config)
        prediction = predict_sessions(profile, contract, channel, pi0, load_chain=chain)
        _logger.debug("UE %d load states: %s", profile.id, prediction.load_states.tolist())
        forecasts.append(UeForecast(profile=profile, load_chain=chain, prediction=prediction))

    return tuple(forecasts)
