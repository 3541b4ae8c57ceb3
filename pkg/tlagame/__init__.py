#! /usr/bin/env python
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""A task-load-aware Bertrand pricing simulator for federated-learning incentives.
"""
__version__ = "0.1"

import logging as _logging
_logger = _logging.getLogger("tlagame")
