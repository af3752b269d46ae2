"""Compiler and simulator for synthesizing bosonic anharmonicities and
nonlinear couplings on hybrid qubit-oscillator hardware."""

from ._core import *  # noqa: F401,F403
