# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.

from typing import Optional


class DtnresWarning(UserWarning):
    pass


class ResolutionWarning(DtnresWarning):
    """ The mesh is too coarse for the requested Fourier modes. """


class SearchWarning(DtnresWarning):
    """ The spectral indicator search could not isolate a cell. """


class DtnresError(Exception):
    pass


class RangeError(DtnresError, ValueError):
    pass


class DomainError(DtnresError, ValueError):
    pass


class PoleError(DtnresError, ZeroDivisionError):
    pass


class ShapeError(DtnresError, ValueError):
    pass


class MeshError(DtnresError, ValueError):
    def __init__(self, msg: str, check: Optional[str] = None, index: Optional[int] = None):
        super().__init__(msg)
        self.check = check
        self.index = index


class MeshFormatError(MeshError):
    def __init__(self, msg: str, line: Optional[int] = None, column: Optional[int] = None):
        location = ""
        if line is not None:
            location = "line {}".format(line)
            if column is not None:
                location += ", column {}".format(column)

            msg = "{}: {}".format(location, msg)

        super().__init__(msg, check="format")
        self.line = line
        self.column = column


class SingularMatrixError(DtnresError, ArithmeticError):
    def __init__(self, pivot: Optional[int] = None, msg: Optional[str] = None):
        if msg is None:
            msg = "Matrix is singular to working precision"
            if pivot is not None:
                msg += " (pivot {})".format(pivot)

        super().__init__(msg)
        self.pivot = pivot

    def __reduce__(self):
        return type(self), (self.pivot, str(self))


class RefinementError(DtnresError, RuntimeError):
    pass


class ConvergenceError(DtnresError, RuntimeError):
    pass


class ConfigError(DtnresError, ValueError):
    pass
