"""Pulse-coupled oscillator synchronization toolkit.

Core library for simulating pulse-coupled oscillators with delayed directed
coupling, classifying phase response curves, computing closed-form
convergence bounds, and certifying convergence by single-period Monte Carlo.
"""

__version__ = "0.1.0"
