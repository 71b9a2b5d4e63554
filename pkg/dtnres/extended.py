# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


"""
Extended precision Bessel/Hankel values computed with mpmath.

This is the reference the double precision routines of
:py:mod:`dtnres.specfun` are checked against. J_n is summed from its power
series with a working precision large enough to absorb the cancellation,
while Y_n comes from mpmath's own implementation.
"""

import math

import mpmath

#: Digits carried once cancellation has been accounted for.
DIGITS = 30


def _workdps(z) -> int:
    # The power series of J_n loses about |z| * log10(e) digits.
    return DIGITS + int(math.ceil(abs(complex(z)) * math.log10(math.e))) + 10


def besselj_mp(n: int, z, dps: int = None) -> mpmath.mpc:
    """ J_n(z) from its power series in extended precision. """
    dps = dps or _workdps(z)
    with mpmath.workdps(dps):
        z = mpmath.mpc(z)
        half = z / 2
        term = half ** n / mpmath.factorial(n)
        total = term
        k = 0
        eps = mpmath.mpf(10) ** (-dps)
        while abs(term) > eps * abs(total) or k < 2:
            k += 1
            term *= -half * half / (k * (k + n))
            total += term

        return +total


def bessely_mp(n: int, z, dps: int = None) -> mpmath.mpc:
    dps = dps or _workdps(z)
    with mpmath.workdps(dps):
        return mpmath.bessely(n, mpmath.mpc(z))


def hankel1_mp(n: int, z, dps: int = None) -> mpmath.mpc:
    """ H_n^{(1)}(z) = J_n(z) + i Y_n(z) in extended precision. """
    dps = dps or _workdps(z)
    with mpmath.workdps(dps):
        return besselj_mp(n, z, dps) + mpmath.mpc(0, 1) * bessely_mp(n, z, dps)


def hankel1_prime_mp(n: int, z, dps: int = None) -> mpmath.mpc:
    dps = dps or _workdps(z)
    with mpmath.workdps(dps):
        if n == 0:
            return -hankel1_mp(1, z, dps)

        return hankel1_mp(n - 1, z, dps) - (n / mpmath.mpc(z)) * hankel1_mp(n, z, dps)


def to_complex(value) -> complex:
    """ Round an mpmath number to double precision. """
    return complex(value)
