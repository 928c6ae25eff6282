"""
Base exceptions. Every service module defines its own exceptions as
subclasses of one of these two, which decides the CLI exit status.
"""


class EpsicompError(Exception):
    pass


class DataError(EpsicompError):
    """
    The input data (or the request made of it) cannot be served.
    """

    exit_code = 3


class NumericFailure(EpsicompError):
    """
    The quantity asked for is undefined for this input, or its
    computation failed.
    """

    exit_code = 4
