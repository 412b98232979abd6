"""Quantized massive-MIMO downlink: closed-form rates, planners and Monte Carlo.

Converter resolutions are ints, or None for an ideal converter.
SNRs are linear; use db_to_linear for dB.
"""

from ._qmimo import *  # noqa: F401,F403
from ._qmimo import __doc__  # noqa: F401
