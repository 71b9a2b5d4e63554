# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


"""
Bessel and Hankel functions of integer order and complex argument.

Values come from `scipy.special` (AMOS). Derivatives are formed with the
recurrence H_n' = H_{n-1} - (n/z) H_n, and ratios H_{n-1}/H_n are built so
that they stay accurate when the individual values overflow.
"""

from typing import Union

import numpy as np
from scipy import special

from dtnres.errors import RangeError, DomainError, PoleError

#: Supported orders are 0..MAX_ORDER.
MAX_ORDER = 60
#: Supported arguments satisfy MIN_ABS_ARG <= |z| <= MAX_ABS_ARG.
MIN_ABS_ARG = 1e-8
MAX_ABS_ARG = 100.
#: |H_n| <= POLE_GUARD * |H_{n-1}| is treated as a zero of H_n.
POLE_GUARD = 1e-15

Complex = Union[complex, float]


class HankelEval:
    """ Value and derivative of H_n^{(1)} at one argument.

    Attributes:
        order: Non-negative integer order n.
        argument: Complex argument z (kR or kr).
        value: H_n^{(1)}(z).
        derivative: H_n^{(1)}'(z).
    """

    __slots__ = ["order", "argument", "value", "derivative"]

    def __init__(self, order: int, argument: complex, value: complex, derivative: complex) -> None:
        self.order = order
        self.argument = argument
        self.value = value
        self.derivative = derivative

    def __repr__(self) -> str:
        return "HankelEval(order={}, argument={}, value={}, derivative={})".format(
            self.order, self.argument, self.value, self.derivative)


def _check_args(n: int, z: Complex):
    if int(n) != n or n < 0 or n > MAX_ORDER:
        raise RangeError("Order must be an integer in [0, {}], got {}.".format(MAX_ORDER, n))

    z = complex(z)
    if z == 0:
        raise DomainError("Bessel functions are evaluated away from z = 0.")

    if not MIN_ABS_ARG <= abs(z) <= MAX_ABS_ARG:
        msg = "|z| = {:g} is outside the supported range [{:g}, {:g}]."
        raise RangeError(msg.format(abs(z), MIN_ABS_ARG, MAX_ABS_ARG))

    return int(n), z


def _finite(value, name: str, n: int, z: complex) -> complex:
    value = complex(value)
    if not np.isfinite(value):
        raise RangeError("{}({}, {}) is not representable.".format(name, n, z))

    return value


def bessel_j(n: int, z: Complex) -> complex:
    """ Bessel function of the first kind J_n(z). """
    n, z = _check_args(n, z)
    return _finite(special.jv(n, z), "J", n, z)


def bessel_y(n: int, z: Complex) -> complex:
    """ Bessel function of the second kind Y_n(z). """
    n, z = _check_args(n, z)
    return _finite(special.yv(n, z), "Y", n, z)


def hankel1(n: int, z: Complex) -> complex:
    """ Hankel function of the first kind H_n^{(1)}(z) = J_n(z) + i Y_n(z).

    Arguments with negative imaginary part are supported; H_n^{(1)} grows
    exponentially there.
    """
    n, z = _check_args(n, z)
    return _finite(special.hankel1(n, z), "H1", n, z)


def _prime(fct, n: int, z: complex) -> complex:
    # Integer-order reflection gives C_{-1} = -C_1 for J, Y and H^{(1)}.
    previous = -fct(1, z) if n == 0 else fct(n - 1, z)
    return previous - (n / z) * fct(n, z)


def bessel_j_prime(n: int, z: Complex) -> complex:
    n, z = _check_args(n, z)
    return _prime(bessel_j, n, z)


def bessel_y_prime(n: int, z: Complex) -> complex:
    n, z = _check_args(n, z)
    return _prime(bessel_y, n, z)


def hankel1_prime(n: int, z: Complex) -> complex:
    """ Derivative H_n^{(1)}'(z) = H_{n-1}^{(1)}(z) - (n/z) H_n^{(1)}(z).

    For n = 0 this is exactly -H_1^{(1)}(z).
    """
    n, z = _check_args(n, z)
    return _prime(hankel1, n, z)


def hankel_eval(n: int, z: Complex) -> HankelEval:
    n, z = _check_args(n, z)
    return HankelEval(n, z, hankel1(n, z), hankel1_prime(n, z))


def hankel_ratios(N: int, z: Complex) -> np.ndarray:
    """ Ratios r_n = H_{n-1}^{(1)}(z) / H_n^{(1)}(z) for n = 0..N.

    The entry n = 0 uses H_{-1} = -H_1, i.e. r_0 = -H_1(z)/H_0(z).

    Ratios are read off exponentially scaled values while those are
    representable and continued with the forward recurrence
    r_{m+1} = 1 / (2m/z - r_m) beyond. H^{(1)} is the dominant solution of
    the three-term recurrence in the order direction, so the forward sweep
    is stable.

    Raises:
        PoleError: when z is (numerically) a zero of some H_n, n <= N.
    """
    _check_args(min(N, MAX_ORDER), z)
    if N > MAX_ORDER:
        raise RangeError("Order must be an integer in [0, {}], got {}.".format(MAX_ORDER, N))

    z = complex(z)
    scaled = special.hankel1e(np.arange(0, max(N, 1) + 1), z)
    magnitude = np.abs(scaled)
    representable = np.isfinite(scaled) & (magnitude > 0)

    if not representable[0] or not representable[1]:
        raise RangeError("H1(0..1, {}) is not representable.".format(z))

    if magnitude[0] <= POLE_GUARD * magnitude[1]:
        raise PoleError("z = {} is a zero of H_0.".format(z))

    ratios = np.empty(N + 1, dtype=complex)
    ratios[0] = -scaled[1] / scaled[0]
    direct = True
    for n in range(1, N + 1):
        direct = direct and representable[n]
        if direct:
            if magnitude[n] <= POLE_GUARD * magnitude[n - 1]:
                raise PoleError("z = {} is a zero of H_{}.".format(z, n))

            ratios[n] = scaled[n - 1] / scaled[n]
        else:
            denominator = 2 * (n - 1) / z - ratios[n - 1]
            if abs(denominator) <= POLE_GUARD:
                raise PoleError("z = {} is a zero of H_{}.".format(z, n))

            ratios[n] = 1. / denominator

    return ratios


def hankel_ratio(n: int, z: Complex) -> complex:
    """ H_{n-1}^{(1)}(z) / H_n^{(1)}(z) for n >= 1, stable for large n. """
    if int(n) != n or n < 1:
        raise RangeError("Ratio order must be >= 1, got {}.".format(n))

    return complex(hankel_ratios(int(n), z)[int(n)])


def hankel1_array(n, z) -> np.ndarray:
    """ Broadcasting H_n^{(1)}(z) without range checks (internal use). """
    return special.hankel1(n, z)


def hankel1_prime_array(n, z) -> np.ndarray:
    """ Broadcasting H_n^{(1)}'(z) through the recurrence (internal use). """
    n = np.asarray(n)
    z = np.asarray(z, dtype=complex)
    previous = np.where(n == 0, -special.hankel1(1, z), special.hankel1(np.abs(n - 1), z))
    # Negative orders only appear through n - 1 = -1 above.
    return previous - (n / z) * special.hankel1(n, z)
