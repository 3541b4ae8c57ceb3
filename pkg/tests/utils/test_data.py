#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Tests for data models.
"""
import logging

import numpy
import pydantic
import pytest
from tlagame.markov import discretize
from tlagame.utils.config import ChainConfig
from tlagame.utils.data import StateSpace
from tlagame.utils.data import MarkovChain
from tlagame.utils.data import ObservationTrace
from tlagame.utils.data import Distribution
from tlagame.utils.data import SessionPrediction
from tlagame.utils.data import SessionEstimates
from tlagame.utils.data import NeOutcome
from tlagame.utils.data import ProfitReport
from tlagame.utils.data import get_chain
from tlagame.utils.data import get_channel
from tlagame.utils.data import get_forecasts
from tlagame.utils.misc import get_digest


def _check_n_errors(model, nerr, **kwargs):
    try:
        model(**kwargs)
        raise AssertionError("Expected exception was not raised.")
    except pydantic.ValidationError as err:
        assert len(err.errors()) == nerr, err


def test_state_space_validation():
    """Levels increase; load starts at 0; gains are positive."""
    assert StateSpace(kind="load", levels=[0., 1.]).count == 2
    assert not StateSpace(kind="gain", levels=[1., 2.]).levels.flags.writeable

    _check_n_errors(StateSpace, 2)
    _check_n_errors(StateSpace, 1, kind="load", levels=[0., 1., 0.5])
    _check_n_errors(StateSpace, 1, kind="load", levels=[0.1, 1.])
    _check_n_errors(StateSpace, 1, kind="gain", levels=[0., 1.])
    _check_n_errors(StateSpace, 1, kind="gain", levels=[1.])
    _check_n_errors(StateSpace, 1, kind="speed", levels=[0., 1.])


def test_markov_chain_validation():
    """Square, bounded, row-stochastic matrices."""
    space = discretize("gain", 1., 2., 2)
    assert MarkovChain(space=space, stp=[[0.5, 0.5], [0., 1.]]).count == 2

    _check_n_errors(MarkovChain, 1, space=space, stp=[[0.5, 0.4], [0.5, 0.5]])
    _check_n_errors(MarkovChain, 1, space=space, stp=numpy.eye(3))
    _check_n_errors(MarkovChain, 1, space=space, stp=[[1.5, -0.5], [0., 1.]])

    with pytest.raises(pydantic.ValidationError, match="row 2 sums to 0.8"):
        MarkovChain(space=space, stp=[[0.5, 0.5], [0.4, 0.4]])


def test_trace_and_distribution_validation():
    """1D non-negative traces; probability vectors sum to 1."""
    assert ObservationTrace(slots=[0, 1, 1]).slots.dtype.kind == "i"
    _check_n_errors(ObservationTrace, 1, slots=[[0, 1]])
    _check_n_errors(ObservationTrace, 1, slots=[-1, 0])
    _check_n_errors(ObservationTrace, 1, slots=[0, 1], window=0.)

    assert len(Distribution(probs=[0.25, 0.75])) == 2
    _check_n_errors(Distribution, 1, probs=[0.5, 0.4])
    _check_n_errors(Distribution, 1, probs=[])
    _check_n_errors(Distribution, 1, probs=[-0.5, 1.5])


def test_get_chain(caplog):
    """Matrices, renormalized matrices, and traces."""
    chain = get_chain("gain", 1., 2., 2, ChainConfig(trace=[0, 0, 1, 0]))
    assert numpy.allclose(chain.stp, [[0.5, 0.5], [1., 0.]])

    with caplog.at_level(logging.WARNING, logger="tlagame"):
        chain = get_chain("load", 0., 1., 2, ChainConfig(matrix=[[0.5, 0.4], [0.5, 0.5]], renormalize=True))
    assert numpy.allclose(chain.stp[0], [5./9., 4./9.])
    assert "Renormalized load chain row 1" in caplog.text


def test_get_channel(ref_scenario):
    """Initial distribution from the file, or uniform."""
    chain, pi0 = get_channel(ref_scenario.channel)
    assert chain.count == 10
    assert pi0.probs[0] == 1.

    channel = ref_scenario.channel.copy(update={"pi0": None})
    _, pi0 = get_channel(channel)
    assert numpy.allclose(pi0.probs, 0.1)


def test_get_forecasts(ref_scenario, ref_forecasts):
    """Predicted EX-load states of the bundled scenario from state 0."""
    assert [fcst.id for fcst in ref_forecasts] == [1, 2, 3, 4]

    expected = {1: [0, 0, 0], 2: [1, 2, 2], 3: [2, 3, 2], 4: [2, 0, 2]}
    for fcst in ref_forecasts:
        assert fcst.prediction.load_states[:3].tolist() == expected[fcst.id]
        assert fcst.prediction.sessions == ref_scenario.contract.I_g

    assert numpy.allclose(ref_forecasts[1].prediction.f_ex[:3], [0.5e9, 1e9, 1e9])
    assert numpy.allclose(ref_forecasts[2].prediction.f_ex[:3], [1e9, 1.5e9, 1e9])
    assert numpy.allclose(ref_forecasts[3].prediction.f_ex[:3], [1e9, 0., 1e9])

    # the channel chain is shared
    gains = {tuple(fcst.prediction.gain_states.tolist()) for fcst in ref_forecasts}
    assert len(gains) == 1


def test_get_forecasts_from_trace(ref_scenario, ref_forecasts):
    """A trace following the argmax path of a matrix predicts the same loads."""
    ue = ref_scenario.ues[1].copy(update={"load_chain": ChainConfig(trace=[0, 1, 2, 2, 2, 2])})
    scenario = ref_scenario.copy(update={"ues": (ue,)})

    fcst, = get_forecasts(scenario)
    assert numpy.array_equal(fcst.prediction.load_states, ref_forecasts[1].prediction.load_states)
    assert fcst.prediction.digest() == ref_forecasts[1].prediction.digest()


def test_session_models_validation():
    """Matching lengths and psi = E_F + E_C."""
    data = {
        "ue": 1, "load_states": [0, 1], "f_ex": [0., 1e9], "gain_states": [1, 1],
        "gains": [2., 2.],
    }
    assert SessionPrediction(**data).sessions == 2
    _check_n_errors(SessionPrediction, 1, **{**data, "f_ex": [0.]})
    _check_n_errors(SessionPrediction, 1, **{**data, "gains": [0., 2.]})

    est = {
        **data, "theta": 0.5, "iterations": 0.5, "f_k": 3e8, "E_F": [1e-10, 2e-10],
        "E_C": [1e-10, 1e-10], "psi": numpy.add([1e-10, 2e-10], [1e-10, 1e-10]),
    }
    assert SessionEstimates(**est).sessions == 2
    _check_n_errors(SessionEstimates, 1, **{**est, "psi": [2e-10, 4e-10]})
    bad_ec = {**est, "E_C": [0., 1e-10], "psi": numpy.add([1e-10, 2e-10], [0., 1e-10])}
    _check_n_errors(SessionEstimates, 1, **bad_ec)
    _check_n_errors(SessionEstimates, 1, **{**est, "theta": 0.})


def test_outcome_models_validation():
    """Per-UE arrays match the UE list."""
    assert NeOutcome().mo_payment == 0.

    data = {
        "ue_ids": (1,), "prices": [[0.2, 0.3]], "theta": [0.5], "theta_accounting": [0.5],
        "profits": [0.1], "payments": [0.2], "iterations_exact": [0.69], "iterations_taylor": [0.5],
    }
    assert NeOutcome(**data).mo_payment == pytest.approx(0.2)
    _check_n_errors(NeOutcome, 1, **{**data, "theta": [0.5, 0.5]})
    _check_n_errors(NeOutcome, 1, **{**data, "prices": [[-0.2, 0.3]]})
    _check_n_errors(NeOutcome, 1, **data, iterations=2)
    _check_n_errors(NeOutcome, 1, **data, survivors=(1,), eliminated_ues=(1,))

    report = ProfitReport(scheme="ILPS", ue_ids=(1, 2), profits=(1., 2.), payments=(3., 4.))
    assert report.profit_of(2) == 2.
    _check_n_errors(ProfitReport, 1, scheme="ILPS", ue_ids=(1, 2), profits=(1.,), payments=(3., 4.))
    _check_n_errors(ProfitReport, 1, scheme="AUCTION")


def test_misc_helpers():
    """Stable digests."""
    arr = numpy.arange(4.)
    assert get_digest("a", arr) == get_digest("a", arr.copy())
    assert get_digest("a", arr) != get_digest("a", arr + 1.)
    assert get_digest("ab") != get_digest("a", "b")
    assert len(get_digest()) == 12
