"""Airborne Green Leaf Volatile stress signalling between plants.

Pipeline: pulsed transmitter -> stochastic diffusion-advection channel ->
multiplicative Beta loss -> leaf uptake -> four-enzyme receiver -> alarm.
"""

__version__ = "0.1.0"

MOLECULES = ("HAL", "HOL", "HAC")
