#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Shared fixtures: the bundled scenario and a builder of small constructed scenarios.
"""
import pathlib

import pytest
from tlagame.utils.config import Scenario
from tlagame.utils.config import load_scenario
from tlagame.utils.data import get_forecasts

REF_SCENARIO = pathlib.Path(__file__).resolve().parents[1].joinpath(
    "cases", "wlan_4ue", "wlan_4ue.scenario")


def identity_rows(count):
    """Rows of an identity transition matrix."""
    return [[1. if i == j else 0. for j in range(count)] for i in range(count)]


def build_scenario(
    loads=(0,), *, sessions=1, v=0.5, epsilon=0.5, eta=1., gain_state=1, name="constructed",
    **solver
):
    """A scenario whose UEs stay at fixed load states and whose channel stays at one gain state.

    Arguments
    ---------
    loads : sequence of int
        One load state (0..4 on a 0..2 GHz grid) per UE; UE ids are 1, 2, ...
    sessions : int
        Number of global sessions.
    v, epsilon, eta : float
    gain_state : int
        0 or 1 on a two-level gain grid [1, 2].
    **solver
        SolverConfig fields by attribute name.
    """
    ues = [
        {
            "id": k + 1,
            "switched capacitance": 1e-28,
            "cycles per sample": 15.,
            "dataset size": 8e7,
            "eta": eta,
            "max frequency": 2e9,
            "load levels": 5,
            "initial load state": state,
            "load chain": {"matrix": identity_rows(5)},
        }
        for k, state in enumerate(loads)
    ]

    pi0 = [0., 0.]
    pi0[gain_state] = 1.

    return Scenario(**{
        "name": name,
        "contract": {
            "global accuracy": epsilon, "zeta": 1., "global sessions": sessions,
            "training time": 2., "communication time": 0.2, "substitutability": v,
            "bandwidth": 1e6, "model size": 1e5, "noise power": 1e-9, "bit error rate": 1e-3,
            "correlation time": 0.2,
        },
        "solver": solver,
        "channel": {
            "min gain": 1., "max gain": 2., "gain levels": 2,
            "gain chain": {"matrix": identity_rows(2)}, "initial distribution": pi0,
        },
        "user equipments": ues,
    })


@pytest.fixture(name="ref_scenario", scope="session")
def fixture_ref_scenario():
    """The bundled four-UE scenario."""
    return load_scenario(REF_SCENARIO)


@pytest.fixture(name="ref_forecasts", scope="session")
def fixture_ref_forecasts(ref_scenario):
    """Forecasts of the bundled scenario."""
    return get_forecasts(ref_scenario)


@pytest.fixture(name="builder")
def fixture_builder():
    """The constructed-scenario builder."""
    return build_scenario


@pytest.fixture(name="ref_path", scope="session")
def fixture_ref_path():
    """Path to the bundled four-UE scenario file."""
    return REF_SCENARIO
