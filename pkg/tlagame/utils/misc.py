#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""A collection of some misc stuff.
"""
import hashlib as _hashlib
import logging as _logging

import numpy as _numpy


_logger = _logging.getLogger("tlagame.utils.misc")


def as_readonly(array, dtype=float):
    """Copy into a read-only numpy array."""
    array = _numpy.array(array, dtype=dtype)
    array.flags.writeable = False
    return array


def get_digest(*items):
    """A short sha256 hash over strings and numpy arrays, in order."""
    hasher = _hashlib.sha256()
    for item in items:
        if isinstance(item, _numpy.ndarray):
            hasher.update(str(item.dtype).encode())
            hasher.update(str(item.shape).encode())
            hasher.update(_numpy.ascontiguousarray(item).tobytes())
        else:
            hasher.update(str(item).encode())
        hasher.update(b"\x00")
    return hasher.hexdigest()[:12]
