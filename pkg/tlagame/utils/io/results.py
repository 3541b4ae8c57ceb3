#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""CSV and JSON writers and readers of simulation results.
"""
import csv as _csv
import enum as _enum
import json as _json
import logging as _logging
import pathlib as _pathlib

import numpy as _numpy
from tlagame.utils.config import BaseConfig as _BaseConfig
from tlagame.utils.data.outcome import NeOutcome as _NeOutcome
from tlagame.utils.data.outcome import ResultBundle as _ResultBundle

_logger = _logging.getLogger("tlagame.utils.io.results")

PRICES_HEADER = ("iteration", "ue", "session", "price", "grad_norm")
PROFITS_HEADER = ("scheme", "ue", "profit_J", "payment_J")
PREDICTIONS_HEADER = ("ue", "session", "load_state_hz", "gain_state", "eF_J", "eC_J", "psi_J")
SWEEP_HEADER = ("epsilon", "theta_max", "status", "survivors", "mo_payment_J")
COMPARISON_HEADER = ("epsilon", "scheme", "ue", "profit_J", "payment_J")


def _jsonable(value):
    """Convert models, arrays, enums and tuples into plain JSON types."""
    if isinstance(value, _BaseConfig):
        return {key: _jsonable(val) for key, val in value.__dict__.items()}
    if isinstance(value, _numpy.ndarray):
        return value.tolist()
    if isinstance(value, _enum.Enum):
        return value.value
    if isinstance(value, (tuple, list)):
        return [_jsonable(val) for val in value]
    if isinstance(value, dict):
        return {key: _jsonable(val) for key, val in value.items()}
    if isinstance(value, _numpy.generic):
        return value.item()
    return value


def _write_rows(path, header, rows):
    """Write a CSV file with a header row and "\\n" line endings."""
    path = _pathlib.Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fobj:
        writer = _csv.writer(fobj, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    _logger.info("Wrote %s", path)
    return path


def write_prices(outcome: _NeOutcome, path):
    """One row per sweep, UE and session of the trajectory."""
    rows = []
    for record in outcome.trajectory:
        for ue, prices, norm in zip(outcome.ue_ids, record.prices.tolist(), record.grad_norms.tolist()):
            rows.extend([record.iteration, ue, t+1, price, norm] for t, price in enumerate(prices))
    return _write_rows(path, PRICES_HEADER, rows)


def write_profits(reports, path):
    """One row per scheme and UE."""
    rows = []
    for report in reports:
        rows.extend(
            [report.scheme.value, ue, profit, payment]
            for ue, profit, payment in zip(report.ue_ids, report.profits, report.payments)
        )
    return _write_rows(path, PROFITS_HEADER, rows)


def write_comparison(points, path):
    """One row per global accuracy, scheme and UE."""
    rows = []
    for point in points:
        for report in point.reports:
            rows.extend(
                [point.epsilon, report.scheme.value, ue, profit, payment]
                for ue, profit, payment in zip(report.ue_ids, report.profits, report.payments)
            )
    return _write_rows(path, COMPARISON_HEADER, rows)


def write_predictions(estimates, path):
    """One row per UE and session of the true-model estimates."""
    rows = []
    for est in estimates:
        rows.extend(
            [est.ue, t+1, f_ex, gain_state, e_f, e_c, psi]
            for t, (f_ex, gain_state, e_f, e_c, psi) in enumerate(zip(
                est.f_ex.tolist(), est.gain_states.tolist(), est.E_F.tolist(), est.E_C.tolist(),
                est.psi.tolist()))
        )
    return _write_rows(path, PREDICTIONS_HEADER, rows)


def write_sweep(points, path):
    """One row per global accuracy; survivors are ";"-separated ids."""
    rows = [
        [
            point.epsilon, "" if point.theta_max is None else point.theta_max, point.status,
            ";".join(str(ue) for ue in point.survivors), point.mo_payment
        ]
        for point in points
    ]
    return _write_rows(path, SWEEP_HEADER, rows)


def dump_outcome(outcome: _NeOutcome, path):
    """Write an outcome to JSON with sorted keys; floats keep their shortest round-trip form."""
    path = _pathlib.Path(path)
    with open(path, "w", encoding="utf-8") as fobj:
        _json.dump(_jsonable(outcome), fobj, sort_keys=True, indent=2, allow_nan=False)
        fobj.write("\n")
    _logger.info("Wrote %s", path)
    return path


def load_outcome(path):
    """Read an outcome written by `dump_outcome`."""
    with open(_pathlib.Path(path), "r", encoding="utf-8") as fobj:
        return _NeOutcome(**_json.load(fobj))


def emit_results(bundle: _ResultBundle, directory):
    """Write prices.csv, profits.csv, predictions.csv and outcome.json.

    Arguments
    ---------
    bundle : tlagame.utils.data.ResultBundle
    directory : str or os.PathLike
        Created when missing.

    Returns
    -------
    A list of the written paths.
    """
    directory = _pathlib.Path(directory).expanduser()
    directory.mkdir(parents=True, exist_ok=True)

    return [
        write_prices(bundle.ne, directory.joinpath("prices.csv")),
        write_profits(bundle.reports, directory.joinpath("profits.csv")),
        write_predictions(bundle.predictions, directory.joinpath("predictions.csv")),
        dump_outcome(bundle.ne, directory.joinpath("outcome.json")),
    ]
