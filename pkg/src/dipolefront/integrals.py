"""Closed forms of the one-dimensional integral families behind the dipole results.

    I(a)     = int_0^inf exp(-x^2/4)/x sin(a x) dx         = (pi/2) erf(a)
    I1(r, t) = int_0^inf exp(-x^2/4)/(2x) [sin(x(r-t)) + sin(x(r+t))] dx
             = (I(r - t) + I(r + t)) / 2
    I2(a)    = int_0^inf x^2 exp(-x^2/2) cos(a x) dx      = sqrt(pi/2) (1 - a^2) exp(-a^2/2)
    I3(a)    = int_0^inf x exp(-x^2/2) cos(a x) dx        = 1 - 2u daw(u),  u = a/sqrt(2)

Lengths are in units of eps.
"""

from __future__ import annotations

import math

import numpy as np

from .special import dawson, erf


def integral_I(a):
    return 0.5 * math.pi * erf(a)


def integral_I1(r, t):
    return 0.5 * (integral_I(np.subtract(r, t)) + integral_I(np.add(r, t)))


def integral_I2(a):
    a = np.asarray(a, dtype=float)
    out = math.sqrt(math.pi / 2) * (1.0 - a * a) * np.exp(-0.5 * a * a)
    return float(out) if out.ndim == 0 else out


def integral_I3(a):
    u = np.asarray(a, dtype=float) / math.sqrt(2.0)
    out = 1.0 - 2.0 * u * dawson(u)
    return float(out) if np.ndim(out) == 0 else out
