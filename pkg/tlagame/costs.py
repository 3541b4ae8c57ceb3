#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Iteration accounting and per-session energy estimation.
"""
import math as _math
import logging as _logging
from typing import Optional as _Optional

import numpy as _numpy
from tlagame.markov import predict_load_sequence as _predict_load_sequence
from tlagame.markov import predict_channel_state as _predict_channel_state
from tlagame.utils.config import UeProfile as _UeProfile
from tlagame.utils.config import MoContract as _MoContract
from tlagame.utils.data.chains import MarkovChain as _MarkovChain
from tlagame.utils.data.chains import Distribution as _Distribution
from tlagame.utils.data.chains import get_chain as _get_chain
from tlagame.utils.data.sessions import SessionPrediction as _SessionPrediction
from tlagame.utils.data.sessions import SessionEstimates as _SessionEstimates
from tlagame.utils.errors import InvalidArgumentError as _InvalidArgumentError
from tlagame.utils.errors import InfeasibleContractError as _InfeasibleContractError
from tlagame.utils.errors import FrequencyCapError as _FrequencyCapError

_logger = _logging.getLogger("tlagame.costs")

# theta_max at or below this is treated as the zero boundary
THETA_MAX_TOL = 1e-12


def local_iterations(theta: float, eta: float):
    """Local iterations needed for a local relative accuracy: eta * ln(1/theta)."""

    if not 0. < theta < 1.:
        raise _InvalidArgumentError(f"theta must be in (0, 1), got {theta}")

    return eta * _math.log(1. / theta)


def local_iterations_taylor(theta: float, eta: float):
    """The first-order form eta * (1 - theta) used by the game algebra."""
    return eta * (1. - theta)


def global_iterations(epsilon: float, zeta: float, theta_max: float):
    """Global iterations needed for a global accuracy: zeta * ln(1/epsilon) / (1 - theta_max)."""

    if not 0. < epsilon <= 1.:
        raise _InvalidArgumentError(f"epsilon must be in (0, 1], got {epsilon}")

    if theta_max >= 1.:
        raise _InvalidArgumentError(f"theta_max must be below 1, got {theta_max}")

    return zeta * _math.log(1. / epsilon) / (1. - theta_max)


def theta_max(epsilon: float, zeta: float, I_g: int):  # pylint: disable=invalid-name
    """The largest local accuracy the MO can accept with I_g global sessions.

    Raises
    ------
    InfeasibleContractError
        When the result is not positive, i.e., I_g sessions cannot reach epsilon.
    """

    if I_g <= 0:
        raise _InvalidArgumentError(f"I_g must be positive, got {I_g}")

    if not 0. < epsilon <= 1.:
        raise _InvalidArgumentError(f"epsilon must be in (0, 1], got {epsilon}")

    result = 1. - zeta * _math.log(1. / epsilon) / I_g

    if result <= THETA_MAX_TOL:
        raise _InfeasibleContractError(
            f"epsilon = {epsilon} needs theta_max = {result:.6g} <= 0 with {I_g} global sessions; "
            "the MO needs to lower the performance metrics"
        )

    return result


def required_extra_frequency(profile: _UeProfile, iterations: float, T_trn: float):  # pylint: disable=invalid-name
    """The CPU frequency (Hz) a UE adds for the FL task: c * |D| * I / T_trn."""

    if iterations < 0.:
        raise _InvalidArgumentError(f"iterations must be non-negative, got {iterations}")

    return profile.c * profile.dataset_size * iterations / T_trn


def training_energy(
    nu: float, f_ex: float, f_k: float, T_trn: float,  # pylint: disable=invalid-name
    f_max: _Optional[float] = None, session: int = 1
):
    """Extra training energy (J) of the FL task on top of the EX-task load.

    Arguments
    ---------
    nu : float
        Effective switched capacitance.
    f_ex, f_k : float
        The EX-task load and the extra frequency of the FL task (Hz).
    T_trn : float
        Duration of the training session (s).
    f_max : float or None
        When given, f_ex + f_k above it raises FrequencyCapError.
    session : int
        1-based session index reported in the error.

    Returns
    -------
    nu * ((f_ex + f_k)**2 - f_ex**2) * T_trn, evaluated as nu * f_k * (2 * f_ex + f_k) * T_trn.
    """

    if f_ex < 0. or f_k < 0.:
        raise _InvalidArgumentError(f"frequencies must be non-negative, got {f_ex} and {f_k}")

    if f_max is not None and f_ex + f_k > f_max:
        raise _FrequencyCapError(session, f_ex, f_k, f_max)

    return nu * (f_k * (2. * f_ex + f_k)) * T_trn


def ber_gap(ber: float):
    """The SNR gap 1.5 / (-ln(5 * BER)) of a target bit error rate."""

    if not 0. < 5. * ber < 1.:
        raise _InvalidArgumentError(f"5 * BER must be in (0, 1), got {5.*ber}")

    return 1.5 / (- _math.log(5. * ber))


def transmit_power(contract: _MoContract, gain: float):
    """The minimum power (W) that sends the model within T_com at the given channel gain."""

    if not gain > 0.:
        raise _InvalidArgumentError(f"channel gain must be positive, got {gain}")

    snr = _math.expm1(_math.log(2.) * contract.L / (contract.W * contract.T_com))
    return snr * contract.sigma2 / (gain * ber_gap(contract.ber))


def transmission_energy(contract: _MoContract, gain: float):
    """Energy (J) of one parameter transmission at the given channel gain."""
    return transmit_power(contract, gain) * contract.T_com


def predict_sessions(
    profile: _UeProfile, contract: _MoContract, channel: _MarkovChain, pi0: _Distribution,
    load_chain: _Optional[_MarkovChain] = None
):
    """Predict the load and gain states of every global session.

    Arguments
    ---------
    profile : tlagame.utils.config.UeProfile
    contract : tlagame.utils.config.MoContract
    channel : tlagame.utils.data.MarkovChain
        The channel-gain chain.
    pi0 : tlagame.utils.data.Distribution
        Gain distribution before the first session.
    load_chain : tlagame.utils.data.MarkovChain or None
        The UE's built load chain. Built from `profile.load_chain` when None.

    Returns
    -------
    tlagame.utils.data.SessionPrediction
    """

    if load_chain is None:
        load_chain = _get_chain("load", 0., profile.f_max, profile.levels, profile.load_chain)

    load_states = _predict_load_sequence(load_chain, profile.initial_load_state, contract.I_g)
    gain_states = [
        _predict_channel_state(channel, pi0, t, contract.delta) for t in range(1, contract.I_g+1)]

    return _SessionPrediction(
        ue=profile.id,
        load_states=load_states,
        f_ex=load_chain.space.levels[load_states],
        gain_states=gain_states,
        gains=channel.space.levels[gain_states],
    )


def session_costs(
    profile: _UeProfile, contract: _MoContract, prediction: _SessionPrediction, theta: float,
    *, taylor: bool = False, enforce_cap: bool = True, load_aware: bool = True
):
    """Energy estimates of predicted sessions at a local accuracy.

    Arguments
    ---------
    profile : tlagame.utils.config.UeProfile
    contract : tlagame.utils.config.MoContract
    prediction : tlagame.utils.data.SessionPrediction
    theta : float
        Local relative accuracy in (0, 1); 1 is accepted with the Taylor count.
    taylor : bool
        Count local iterations with eta * (1 - theta) instead of eta * ln(1/theta).
    enforce_cap : bool
        Raise FrequencyCapError at the first session with f_ex + f_k > f_max. Otherwise the
        offending sessions are listed in `cap_violations`.
    load_aware : bool
        False estimates every session as if f_ex were 0.

    Returns
    -------
    tlagame.utils.data.SessionEstimates
    """

    if taylor:
        iterations = local_iterations_taylor(theta, profile.eta)
    else:
        iterations = local_iterations(theta, profile.eta)

    f_k = required_extra_frequency(profile, iterations, contract.T_trn)
    f_ex = prediction.f_ex if load_aware else _numpy.zeros_like(prediction.f_ex)

    over = _numpy.flatnonzero(f_ex + f_k > profile.f_max)
    if over.size > 0:
        if enforce_cap:
            raise _FrequencyCapError(int(over[0])+1, float(f_ex[over[0]]), f_k, profile.f_max)
        _logger.warning("UE %d exceeds f_max in sessions %s", profile.id, (over+1).tolist())

    e_f = _numpy.array([
        training_energy(profile.nu, load, f_k, contract.T_trn) for load in f_ex.tolist()])
    e_c = _numpy.array([transmission_energy(contract, gain) for gain in prediction.gains.tolist()])

    return _SessionEstimates(
        ue=profile.id, theta=theta, iterations=iterations, f_k=f_k,
        load_states=prediction.load_states, f_ex=f_ex,
        gain_states=prediction.gain_states, gains=prediction.gains,
        E_F=e_f, E_C=e_c, psi=e_f+e_c, cap_violations=tuple((over+1).tolist()),
    )


def estimate_sessions(
    profile: _UeProfile, contract: _MoContract, channel: _MarkovChain, pi0: _Distribution,
    theta: float, *, load_chain: _Optional[_MarkovChain] = None, taylor: bool = False,
    enforce_cap: bool = True
):
    """Predict a UE's sessions and estimate their energies at a local accuracy.

    See `predict_sessions` and `session_costs` for the arguments.

    Returns
    -------
    tlagame.utils.data.SessionEstimates

    Raises
    ------
    FrequencyCapError
        With the 1-based index of the first session where f_ex + f_k > f_max.
    """
    prediction = predict_sessions(profile, contract, channel, pi0, load_chain)
    return session_costs(
        profile, contract, prediction, theta, taylor=taylor, enforce_cap=enforce_cap)
