#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Install TLAGame.

Notes
-----
Configuration of the package/project lives in setup.cfg.
"""
from setuptools import setup

setup()
