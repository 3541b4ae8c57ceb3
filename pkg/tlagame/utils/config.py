#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Objects holding scenario configurations.
"""
import hashlib as _hashlib
import logging as _logging
import pathlib as _pathlib
from typing import Literal as _Literal
from typing import Tuple as _Tuple
from typing import Union as _Union
from typing import Optional as _Optional
from yaml import load as _load
from yaml import dump as _dump
from yaml import Loader as _Loader
from yaml import YAMLError as _YAMLError
from yaml import add_constructor as _add_constructor
from yaml import add_representer as _add_representer
from pydantic import BaseModel as _BaseModel
from pydantic import Field as _Field
from pydantic import validator as _validator
from pydantic import root_validator as _root_validator
from pydantic import conint as _conint
from pydantic import confloat as _confloat
from pydantic import validate_model as _validate_model
from tlagame.utils.errors import ScenarioError as _ScenarioError

_logger = _logging.getLogger("tlagame.utils.config")

# alias to type hints
RowsTypeHint = _Tuple[_Tuple[_confloat(ge=0., le=1.), ...], ...]

PricingTypeHint = _Union[
    _Literal["break_even", "zeros"],
    _Tuple[_Tuple[_confloat(ge=0.), ...], ...],
]

ModeTypeHint = _Literal["printed", "derived"]

CouplingTypeHint = _Literal["session", "aggregate"]

CountingTypeHint = _Literal["taylor", "exact"]

ROW_SUM_TOL = 1e-12


def stochastic_row_errors(rows):
    """Return messages naming the rows (1-based) that do not sum to 1.

    Arguments
    ---------
    rows : a sequence of sequences of floats

    Returns
    -------
    A list of str; empty if every row sums to 1 within 1e-12.
    """
    return [
        f"row {i+1} sums to {sum(row):.12g}" for i, row in enumerate(rows)
        if abs(sum(row) - 1.) > ROW_SUM_TOL
    ]


class BaseConfig(_BaseModel):
    """Extending pydantic.BaseModel with __getitem__ method."""

    class Config:  # pylint: disable=too-few-public-methods
        """pydantic configuration of this model."""
        validate_all = True
        allow_population_by_field_name = True
        arbitrary_types_allowed = True
        extra = "forbid"

    def __getitem__(self, key):
        return super().__getattribute__(key)

    def __setitem__(self, key, value):
        self.__setattr__(key, value)

    def check(self):
        """Manually trigger the validation of the data in this instance."""
        _, _, validation_error = _validate_model(self.__class__, self.__dict__)

        if validation_error:
            raise validation_error

        for field in self.__dict__.values():
            if isinstance(field, BaseConfig):
                field.check()
            elif isinstance(field, tuple):
                for item in field:
                    if isinstance(item, BaseConfig):
                        item.check()


class MoContract(BaseConfig):
    """The MO's ordered performance metrics and the market/radio parameters.

    Attributes
    ----------
    epsilon : float
        Global relative accuracy in (0, 1].
    zeta : float
        The positive constant of the global-iteration bound.
    I_g : int
        Number of global sessions.
    T_trn, T_com : float
        Durations (s) of one local training session and one parameter transmission.
    v : float
        Resource substitutability in [0, 1).
    W : float
        Bandwidth (Hz).
    L : float
        Size of the model parameters (bits).
    sigma2 : float
        Noise power (W).
    ber : float
        Target bit error rate; 5 * ber must stay below 1.
    Tc : float
        Channel correlation time (s).
    delta : int
        T_trn / Tc. Derived when omitted.
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    epsilon: _confloat(gt=0., le=1.) = _Field(..., alias="global accuracy")
    zeta: _confloat(gt=0.) = 1.
    I_g: _conint(strict=True, ge=1) = _Field(..., alias="global sessions")
    T_trn: _confloat(gt=0.) = _Field(..., alias="training time")
    T_com: _confloat(gt=0.) = _Field(..., alias="communication time")
    v: _confloat(ge=0., lt=1.) = _Field(..., alias="substitutability")
    W: _confloat(gt=0.) = _Field(..., alias="bandwidth")
    L: _confloat(gt=0.) = _Field(..., alias="model size")
    sigma2: _confloat(gt=0.) = _Field(..., alias="noise power")
    ber: _confloat(gt=0., lt=0.2) = _Field(..., alias="bit error rate")
    Tc: _confloat(gt=0.) = _Field(..., alias="correlation time")
    delta: _Optional[_conint(strict=True, ge=1)] = _Field(None, alias="delta")

    @_validator("delta", always=True)
    def _val_delta(cls, v, values):
        """Derive or validate delta = T_trn / Tc."""
        try:
            t_trn, t_c = values["T_trn"], values["Tc"]
        except KeyError as err:
            raise AssertionError("Please fix `training time` and `correlation time` first.") from err

        if v is None:
            v = int(round(t_trn / t_c))
            assert v >= 1, f"T_trn / Tc = {t_trn/t_c} is not a positive integer"

        assert abs(v * t_c - t_trn) <= 1e-9, f"delta * Tc = {v*t_c} differs from T_trn = {t_trn}"
        return v


class SolverConfig(BaseConfig):
    """Controls of the NE solver and of the comparison schemes.

    Attributes
    ----------
    xi : float
        Ratio of the gradient-decay stop rule, in (0, 1).
    max_iters : int
        Cap on the number of best-response sweeps.
    mode : str
        Either "printed" or "derived" MO response.
    initial_pricing : str or K-by-I_g rows of floats
        "break_even", "zeros", or explicit starting prices.
    coupling : str
        "session" (per-session sub-markets) or "aggregate" (sums over all sessions).
    counting : str
        Iteration count feeding energies and payments: "taylor" or "exact".
    gtol : float
        Gradient norms at or below this value are recorded as zero.
    theta_floor : float
        Lower end of the accounting clamp of purchased accuracies.
    markup : float
        Markup of the ILPS baseline.
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    xi: _confloat(gt=0., lt=1.) = 0.01
    max_iters: _conint(strict=True, ge=1) = _Field(500, alias="max iterations")
    mode: ModeTypeHint = "printed"
    initial_pricing: PricingTypeHint = _Field("break_even", alias="initial pricing")
    coupling: CouplingTypeHint = "session"
    counting: CountingTypeHint = _Field("taylor", alias="iteration count")
    gtol: _confloat(ge=0.) = _Field(1e-12, alias="gradient floor")
    theta_floor: _confloat(gt=0., lt=1.) = _Field(1e-6, alias="theta floor")
    markup: _confloat(ge=0.) = 0.1

    @_validator("initial_pricing")
    def _val_initial_pricing(cls, v):
        """Explicit prices must form a rectangular table."""
        if isinstance(v, tuple):
            assert len(v) > 0, "explicit initial prices must not be empty"
            assert all(len(row) == len(v[0]) for row in v), "explicit initial prices are ragged"
        return v

    def digest(self):
        """A short, stable hash of these settings."""
        return _hashlib.sha256(self.json(by_alias=True, sort_keys=True).encode()).hexdigest()[:12]


class ChainConfig(BaseConfig):
    """Where a Markov chain comes from: a transition matrix or a raw trace of state indices.

    Attributes
    ----------
    matrix : rows of floats or None
        A square, row-stochastic transition matrix.
    trace : tuple of int or None
        State indices observed once per slot.
    window : float or None
        The observation/update period (s) of the trace.
    renormalize : bool
        Divide each row by its sum when the chain is built instead of rejecting the matrix.
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    matrix: _Optional[RowsTypeHint] = None
    trace: _Optional[_Tuple[_conint(strict=True, ge=0), ...]] = None
    window: _Optional[_confloat(gt=0.)] = _Field(None, alias="observation window")
    renormalize: bool = False

    @_root_validator(pre=False, skip_on_failure=True)
    def _val_source(cls, values):
        """Validations that rely the existence of other fields."""
        matrix, trace = values["matrix"], values["trace"]
        assert (matrix is None) != (trace is None), "exactly one of `matrix` or `trace` must be set"

        if matrix is not None:
            assert len(matrix) >= 2, "a transition matrix needs at least 2 states"
            assert all(len(row) == len(matrix) for row in matrix), "the matrix is not square"
            if not values["renormalize"]:
                errors = stochastic_row_errors(matrix)
                assert not errors, "; ".join(errors)
            else:
                assert all(sum(row) > 0. for row in matrix), "cannot renormalize an all-zero row"
        else:
            assert len(trace) >= 2, "a trace needs at least 2 slots"

        return values

    @property
    def count(self):
        """Number of states implied by the matrix, or None for a trace."""
        return None if self.matrix is None else len(self.matrix)


class UeProfile(BaseConfig):
    """One UE's physical and economic parameters.

    Attributes
    ----------
    id : int
        A unique, positive identifier.
    nu : float
        Effective switched capacitance.
    c : float
        CPU cycles per data sample.
    dataset_size : float
        Number of local samples.
    eta : float
        The local-iteration parameter (>= 0).
    f_max : float
        CPU frequency cap (Hz).
    levels : int
        Number of EX-load levels.
    load_chain : ChainConfig
        Source of the EX-load chain.
    initial_load_state : int
        The EX-load state before the first session.
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    id: _conint(strict=True, ge=1)
    nu: _confloat(gt=0.) = _Field(..., alias="switched capacitance")
    c: _confloat(gt=0.) = _Field(..., alias="cycles per sample")
    dataset_size: _confloat(gt=0.) = _Field(..., alias="dataset size")
    eta: _confloat(ge=0.) = 1.
    f_max: _confloat(gt=0.) = _Field(..., alias="max frequency")
    levels: _conint(strict=True, ge=2) = _Field(5, alias="load levels")
    load_chain: ChainConfig = _Field(..., alias="load chain")
    initial_load_state: _conint(strict=True, ge=0) = _Field(0, alias="initial load state")

    @_root_validator(pre=False, skip_on_failure=True)
    def _val_states(cls, values):
        """Validations that rely the existence of other fields."""
        levels, chain = values["levels"], values["load_chain"]
        if chain.matrix is not None:
            assert chain.count == levels, \
                f"load chain has {chain.count} states but `load levels` is {levels}"
        else:
            assert max(chain.trace) < levels, f"load trace has a state index >= {levels}"
        assert values["initial_load_state"] < levels, \
            f"initial load state {values['initial_load_state']} is out of [0, {levels})"
        return values


class ChannelConfig(BaseConfig):
    """The channel-gain chain shared by all UEs.

    Attributes
    ----------
    g_lo, g_hi : float
        Bounds of the linear channel gain (0 < g_lo < g_hi).
    levels : int
        Number of gain levels.
    chain : ChainConfig
        Source of the gain chain.
    pi0 : tuple of floats or None
        Initial distribution over the gain levels; None means uniform.
    slots : int
        Number of slots X per observation period of a gain trace.
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    g_lo: _confloat(gt=0.) = _Field(..., alias="min gain")
    g_hi: _confloat(gt=0.) = _Field(..., alias="max gain")
    levels: _conint(strict=True, ge=2) = _Field(10, alias="gain levels")
    chain: ChainConfig = _Field(..., alias="gain chain")
    pi0: _Optional[_Tuple[_confloat(ge=0., le=1.), ...]] = _Field(None, alias="initial distribution")
    slots: _conint(strict=True, ge=1) = _Field(100, alias="observation slots")

    @_root_validator(pre=False, skip_on_failure=True)
    def _val_all(cls, values):
        """Validations that rely the existence of other fields."""
        assert values["g_hi"] > values["g_lo"], "`max gain` must be greater than `min gain`"

        levels, chain = values["levels"], values["chain"]
        if chain.matrix is not None:
            assert chain.count == levels, \
                f"gain chain has {chain.count} states but `gain levels` is {levels}"
        else:
            assert max(chain.trace) < levels, f"gain trace has a state index >= {levels}"

        if values["pi0"] is not None:
            assert len(values["pi0"]) == levels, "initial distribution length != `gain levels`"
            assert abs(sum(values["pi0"]) - 1.) <= ROW_SUM_TOL, "initial distribution does not sum to 1"
        return values


class Scenario(BaseConfig):
    """An object holding everything a simulation needs.

    Attributes
    ----------
    name : str
        A label copied into reports.
    contract : MoContract
    solver : SolverConfig
    channel : ChannelConfig
    ues : tuple of UeProfile
    """
    # pylint: disable=too-few-public-methods, no-self-argument, invalid-name, no-self-use

    name: str = "scenario"
    contract: MoContract
    solver: SolverConfig = SolverConfig()
    channel: ChannelConfig
    ues: _Tuple[UeProfile, ...] = _Field((), alias="user equipments")

    @_validator("ues")
    def _val_ues(cls, v):
        """UE ids must be unique."""
        ids = [ue.id for ue in v]
        assert len(ids) == len(set(ids)), f"UE ids are not unique: {ids}"
        return v

    @_root_validator(pre=False, skip_on_failure=True)
    def _val_pricing(cls, values):
        """Explicit initial prices must match the number of UEs and sessions."""
        pricing = values["solver"].initial_pricing
        if isinstance(pricing, tuple):
            shape = (len(values["ues"]), values["contract"].I_g)
            assert (len(pricing), len(pricing[0])) == shape, \
                f"explicit initial prices must be {shape[0]} rows of {shape[1]} values"
        return values


# register the Scenario class in yaml with tag !Scenario
_add_constructor(
    "!Scenario",
    lambda loader, node: Scenario(**loader.construct_mapping(node, deep=True))
)

_add_representer(
    Scenario,
    lambda dumper, data: dumper.represent_mapping(
        tag="!Scenario", mapping=_load(
            data.json(by_alias=True), Loader=_Loader),
        flow_style=False
    )
)


def load_scenario(path):
    """Read and validate a scenario file.

    Arguments
    ---------
    path : str or os.PathLike
        A YAML document tagged `!Scenario`.

    Returns
    -------
    tlagame.utils.config.Scenario

    Raises
    ------
    ScenarioError
        If the file cannot be read, does not parse, or holds something else than a scenario.
    pydantic.ValidationError
        If the scenario violates a model invariant.
    """
    path = _pathlib.Path(path).expanduser()

    try:
        with open(path, "r", encoding="utf-8") as fobj:
            scenario = _load(fobj, _Loader)
    except OSError as err:
        raise _ScenarioError(f"cannot read scenario file {path}: {err.strerror}") from err
    except _YAMLError as err:
        raise _ScenarioError(f"cannot parse scenario file {path}: {err}") from err

    if not isinstance(scenario, Scenario):
        raise _ScenarioError(f"{path} does not hold a `!Scenario` document")

    _logger.info("Loaded scenario %s with %d UEs from %s", scenario.name, len(scenario.ues), path)
    return scenario


def dump_scenario(scenario, path):
    """Write a scenario to a YAML file that `load_scenario` reads back to an equal model."""
    path = _pathlib.Path(path).expanduser()
    with open(path, "w", encoding="utf-8") as fobj:
        fobj.write("--- ")
        _dump(scenario, fobj, sort_keys=False)
    return path
