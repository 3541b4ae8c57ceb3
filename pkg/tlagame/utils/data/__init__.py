#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Data structs of TLAGame.
"""
from tlagame.utils.data.chains import StateSpace
from tlagame.utils.data.chains import MarkovChain
from tlagame.utils.data.chains import ObservationTrace
from tlagame.utils.data.chains import Distribution
from tlagame.utils.data.chains import get_uniform_distribution
from tlagame.utils.data.chains import get_point_distribution
from tlagame.utils.data.chains import get_chain
from tlagame.utils.data.chains import get_channel

from tlagame.utils.data.sessions import SessionPrediction
from tlagame.utils.data.sessions import SessionEstimates
from tlagame.utils.data.sessions import UeForecast
from tlagame.utils.data.sessions import get_forecasts

from tlagame.utils.data.outcome import SchemeId
from tlagame.utils.data.outcome import IterationRecord
from tlagame.utils.data.outcome import NeOutcome
from tlagame.utils.data.outcome import ProfitReport
from tlagame.utils.data.outcome import ResultBundle
