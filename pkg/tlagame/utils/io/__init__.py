#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""I/O of simulation results.
"""
from tlagame.utils.io.results import emit_results
from tlagame.utils.io.results import dump_outcome
from tlagame.utils.io.results import load_outcome
from tlagame.utils.io.results import write_prices
from tlagame.utils.io.results import write_profits
from tlagame.utils.io.results import write_predictions
from tlagame.utils.io.results import write_sweep
from tlagame.utils.io.results import write_comparison
from tlagame.utils.io.results import PRICES_HEADER
from tlagame.utils.io.results import PROFITS_HEADER
from tlagame.utils.io.results import PREDICTIONS_HEADER
from tlagame.utils.io.results import SWEEP_HEADER
from tlagame.utils.io.results import COMPARISON_HEADER
