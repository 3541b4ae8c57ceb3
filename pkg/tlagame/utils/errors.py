#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Exceptions raised by TLAGame.
"""


class TLAGameError(Exception):
    """Base class of all errors raised on purpose by this package."""


class InvalidArgumentError(TLAGameError, ValueError):
    """An argument lies outside the domain of an operation."""


class InsufficientDataError(TLAGameError):
    """An observation trace is too short to estimate anything."""


class InfeasibleContractError(TLAGameError):
    """The MO asks for more accuracy than its global sessions can deliver."""


class FrequencyCapError(TLAGameError):
    """A UE cannot raise its CPU frequency enough for the FL task in a session.

    Attributes
    ----------
    session : int
        The 1-based index of the first offending session.
    f_ex, f_k, f_max : float
        The EX-task load, the required extra frequency, and the cap (Hz).
    """

    def __init__(self, session, f_ex, f_k, f_max):
        self.session = session
        self.f_ex = f_ex
        self.f_k = f_k
        self.f_max = f_max
        super().__init__(
            f"session {session}: f_ex + f_k = {f_ex:.6e} + {f_k:.6e} Hz exceeds f_max = {f_max:.6e}"
        )


class OracleFailureError(TLAGameError):
    """A verification oracle cannot produce an answer."""


class ConfigurationError(TLAGameError):
    """A combination of settings that the models cannot honor."""


class ScenarioError(TLAGameError):
    """A scenario or trace file cannot be read or parsed."""
