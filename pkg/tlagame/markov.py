#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Construction, estimation, and argmax prediction of finite-state Markov chains.
"""
import logging as _logging
import numpy as _numpy
from tlagame.utils.data.chains import StateSpace as _StateSpace
from tlagame.utils.data.chains import MarkovChain as _MarkovChain
from tlagame.utils.data.chains import ObservationTrace as _ObservationTrace
from tlagame.utils.data.chains import Distribution as _Distribution
from tlagame.utils.errors import InvalidArgumentError as _InvalidArgumentError
from tlagame.utils.errors import InsufficientDataError as _InsufficientDataError

_logger = _logging.getLogger("tlagame.markov")

# rows drifting more than this from 1 after a matrix product get renormalized
DRIFT_TOL = 1e-12


def discretize(kind: str, lo: float, hi: float, count: int):
    """Get `count` equal-width levels between two bounds.

    Arguments
    ---------
    kind : str
        "load" or "gain". Load levels must start from 0.
    lo, hi : float
        The bounds; 0 <= lo < hi.
    count : int
        Number of levels; at least 2.

    Returns
    -------
    tlagame.utils.data.StateSpace
    """

    if count < 2:
        raise _InvalidArgumentError(f"need at least 2 levels, got {count}")

    if not hi > lo >= 0.:
        raise _InvalidArgumentError(f"bounds must satisfy 0 <= lo < hi, got {lo} and {hi}")

    if kind == "load" and lo != 0.:
        raise _InvalidArgumentError(f"load levels start from 0, got {lo}")

    levels = lo + (_numpy.arange(count) / (count - 1)) * (hi - lo)
    return _StateSpace(kind=kind, levels=levels)


def estimate_stp(space: _StateSpace, trace: _ObservationTrace):
    """Estimate a transition matrix by counting consecutive pairs of a trace.

    Self-transitions count like any other transition. States never left during the trace get a
    uniform row.

    Arguments
    ---------
    space : tlagame.utils.data.StateSpace
    trace : tlagame.utils.data.ObservationTrace

    Returns
    -------
    tlagame.utils.data.MarkovChain
    """

    if trace.slots.size < 2:
        raise _InsufficientDataError(f"a trace needs at least 2 slots, got {trace.slots.size}")

    if trace.slots.max() >= space.count:
        raise _InvalidArgumentError(f"trace has a state index >= {space.count}")

    counts = _numpy.zeros((space.count, space.count))
    _numpy.add.at(counts, (trace.slots[:-1], trace.slots[1:]), 1.)

    totals = counts.sum(axis=1)
    stp = _numpy.full_like(counts, 1./space.count)
    visited = totals > 0
    stp[visited] = counts[visited] / totals[visited, None]

    _logger.debug("Estimated a %s chain from %d slots", space.kind, trace.slots.size)
    return _MarkovChain(space=space, stp=stp)


def predict_next_state(chain: _MarkovChain, current: int):
    """The most probable next state; ties go to the lowest index."""

    if not 0 <= current < chain.count:
        raise _InvalidArgumentError(f"state {current} is out of [0, {chain.count})")

    return int(_numpy.argmax(chain.stp[current]))


def predict_load_sequence(chain: _MarkovChain, initial: int, horizon: int):
    """Chain `predict_next_state` over `horizon` sessions.

    Returns
    -------
    A list of `horizon` state indices; the first one follows `initial`.
    """

    if horizon < 1:
        raise _InvalidArgumentError(f"horizon must be >= 1, got {horizon}")

    states = []
    current = initial
    for _ in range(horizon):
        current = predict_next_state(chain, current)
        states.append(current)
    return states


def _renormalize(mat):
    """Rescale rows (or a single vector) whose sums drifted from 1."""
    sums = mat.sum(axis=-1, keepdims=True)
    if _numpy.any(_numpy.abs(sums - 1.) > DRIFT_TOL):
        mat = mat / sums
    return mat


def evolve_distribution(chain: _MarkovChain, initial: _Distribution, steps: int):
    """Propagate a distribution `steps` transitions forward.

    The power of the transition matrix is taken by square-and-multiply; the running vector and
    the running square are renormalized after each product if they drift.

    Returns
    -------
    tlagame.utils.data.Distribution
    """

    if steps < 0:
        raise _InvalidArgumentError(f"steps must be >= 0, got {steps}")

    if len(initial) != chain.count:
        raise _InvalidArgumentError(f"distribution has {len(initial)} entries, chain {chain.count}")

    probs = _numpy.array(initial.probs)
    square = _numpy.array(chain.stp)
    while steps > 0:
        if steps & 1:
            probs = _renormalize(probs @ square)
        steps >>= 1
        if steps:
            square = _renormalize(square @ square)

    return _Distribution(probs=probs)


def predict_channel_state(chain: _MarkovChain, initial: _Distribution, t: int, delta):
    """The most probable gain state of the t-th parameter transmission.

    Arguments
    ---------
    chain : tlagame.utils.data.MarkovChain
        The channel-gain chain (one step per channel correlation time).
    initial : tlagame.utils.data.Distribution
        The gain distribution before the first session.
    t : int
        1-based session index.
    delta : int
        Correlation times per training session.

    Returns
    -------
    int
    """

    if isinstance(delta, float) and delta.is_integer():
        delta = int(delta)

    if not isinstance(delta, (int, _numpy.integer)) or isinstance(delta, bool) or delta < 0:
        raise _InvalidArgumentError(f"delta must be a non-negative integer, got {delta}")

    if t < 1:
        raise _InvalidArgumentError(f"session index starts from 1, got {t}")

    probs = evolve_distribution(chain, initial, t * (int(delta) + 1)).probs
    return int(_numpy.argmax(probs))
