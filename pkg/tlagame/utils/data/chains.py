#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Data models of finite-state Markov chains.
"""
from __future__ import annotations as _annotations  # allows us not using quotation marks for hints
from typing import TYPE_CHECKING as _TYPE_CHECKING  # indicates if we have type checking right now
if _TYPE_CHECKING:  # if we are having type checking, then we import corresponding classes/types
    from tlagame.utils.config import ChainConfig, ChannelConfig

# pylint: disable=wrong-import-position, ungrouped-imports
import logging as _logging
from typing import Literal as _Literal
from typing import Optional as _Optional

import numpy as _numpy
from pydantic import validator as _validator
from pydantic import confloat as _confloat
from pydantic import root_validator as _root_validator
from tlagame.utils.config import BaseConfig as _BaseConfig
from tlagame.utils.misc import as_readonly as _as_readonly
from tlagame.utils.config import ROW_SUM_TOL as _ROW_SUM_TOL

_logger = _logging.getLogger("tlagame.utils.data.chains")


class StateSpace(_BaseConfig):
    """Equal-width levels of a load or a gain chain.

    Attributes
    ----------
    kind : str
        Either "load" (levels in Hz) or "gain" (linear channel gains).
    levels : 1D numpy.ndarray
        Strictly increasing level values.
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    kind: _Literal["load", "gain"]
    levels: _numpy.ndarray

    @_validator("levels", pre=True)
    def _val_levels(cls, v, values):
        """Validate the level values."""
        v = _as_readonly(v)
        assert v.ndim == 1 and v.size >= 2, "a state space needs at least 2 levels"
        assert _numpy.all(v[1:] > v[:-1]), "levels are not strictly increasing"
        if values.get("kind") == "gain":
            assert v[0] > 0., "gain levels must be positive"
        elif values.get("kind") == "load":
            assert v[0] == 0., "the lowest load level must be 0"
        return v

    @property
    def count(self):
        """Number of states."""
        return self.levels.size

    def __len__(self):
        return self.levels.size


class MarkovChain(_BaseConfig):
    """A state space with a row-stochastic transition matrix.

    Attributes
    ----------
    space : StateSpace
    stp : 2D numpy.ndarray
        The state transition probabilities; stp[m, i] is the probability of going from m to i.
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    space: StateSpace
    stp: _numpy.ndarray

    @_validator("stp", pre=True)
    def _val_stp_array(cls, v):
        """Convert to a read-only float array."""
        return _as_readonly(v)

    @_root_validator(pre=False, skip_on_failure=True)
    def _val_stp(cls, values):
        """Validations that rely the existence of other fields."""
        stp = _as_readonly(values["stp"])
        count = values["space"].count
        assert stp.shape == (count, count), f"stp must be {count}x{count}, got {stp.shape}"
        assert _numpy.all(stp >= 0.) and _numpy.all(stp <= 1.), "probabilities out of [0, 1]"

        sums = stp.sum(axis=1)
        bad = _numpy.flatnonzero(_numpy.abs(sums - 1.) > _ROW_SUM_TOL)
        assert bad.size == 0, "; ".join(f"row {i+1} sums to {sums[i]:.12g}" for i in bad)

        values["stp"] = stp
        return values

    @property
    def count(self):
        """Number of states."""
        return self.space.count


class ObservationTrace(_BaseConfig):
    """State indices observed once per slot over an observation window.

    Attributes
    ----------
    slots : 1D numpy.ndarray of int
    window : float or None
        The observation/update period (s).
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    slots: _numpy.ndarray
    window: _Optional[_confloat(gt=0.)] = None

    @_validator("slots", pre=True)
    def _val_slots(cls, v):
        """Validate the state indices."""
        v = _as_readonly(v, dtype=int)
        assert v.ndim == 1, "a trace is a 1D sequence of state indices"
        assert _numpy.all(v >= 0), "state indices must be non-negative"
        return v

    def check_against(self, space: StateSpace):
        """Make sure every index exists in a state space."""
        assert self.slots.size == 0 or self.slots.max() < space.count, \
            f"trace has a state index >= {space.count}"


class Distribution(_BaseConfig):
    """A probability vector over the states of a chain.

    Attributes
    ----------
    probs : 1D numpy.ndarray
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    probs: _numpy.ndarray

    @_validator("probs", pre=True)
    def _val_probs(cls, v):
        """Validate the probabilities."""
        v = _as_readonly(v)
        assert v.ndim == 1 and v.size >= 1, "a distribution is a non-empty 1D vector"
        assert _numpy.all(v >= 0.), "probabilities must be non-negative"
        assert abs(v.sum() - 1.) <= _ROW_SUM_TOL, f"probabilities sum to {v.sum():.12g}"
        return v

    def __len__(self):
        return self.probs.size


def get_uniform_distribution(count: int):
    """A uniform Distribution over `count` states."""
    return Distribution(probs=_numpy.full(count, 1./count))


def get_point_distribution(count: int, state: int):
    """A Distribution with all mass at `state`."""
    probs = _numpy.zeros(count)
    probs[state] = 1.
    return Distribution(probs=probs)


def get_chain(kind: str, lo: float, hi: float, count: int, config: ChainConfig):
    """Build a MarkovChain from a chain configuration.

    Arguments
    ---------
    kind : str
        "load" or "gain".
    lo, hi : float
        Bounds of the state space.
    count : int
        Number of states.
    config : tlagame.utils.config.ChainConfig
        Either a matrix or a raw trace. Traces are estimated with `estimate_stp`.

    Returns
    -------
    MarkovChain
    """
    from tlagame.markov import discretize, estimate_stp  # pylint: disable=import-outside-toplevel

    space = discretize(kind, lo, hi, count)

    if config.trace is not None:
        trace = ObservationTrace(slots=config.trace, window=config.window)
        return estimate_stp(space, trace)

    stp = _numpy.array(config.matrix, dtype=float)
    if config.renormalize:
        sums = stp.sum(axis=1)
        for i in _numpy.flatnonzero(_numpy.abs(sums - 1.) > _ROW_SUM_TOL):
            _logger.warning("Renormalized %s chain row %d (sum %.12g)", kind, i+1, sums[i])
        stp = stp / sums[:, None]

    return MarkovChain(space=space, stp=stp)


def get_channel(config: ChannelConfig, window: _Optional[float] = None):
    """Build the channel-gain chain and its initial distribution.

    Arguments
    ---------
    config : tlagame.utils.config.ChannelConfig
    window : float or None
        Observation period of a gain trace when the configuration does not give one.

    Returns
    -------
    chain : MarkovChain
    pi0 : Distribution
        Uniform when the configuration leaves it out.
    """
    if config.chain.trace is not None and config.chain.window is None:
        config = config.copy(update={"chain": config.chain.copy(update={"window": window})})

    chain = get_chain("gain", config.g_lo, config.g_hi, config.levels, config.chain)

    if config.pi0 is None:
        return chain, get_uniform_distribution(chain.count)
    return chain, Distribution(probs=config.pi0)
