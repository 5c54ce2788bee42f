"""Exception hierarchy shared by every stage of the toolkit."""

from __future__ import annotations


class EmdatGeoError(Exception):
    """Base class for all errors raised by emdatgeo."""

    kind = "error"


class FormatError(EmdatGeoError):
    """Input file does not have the expected structure."""

    kind = "format"


class ValidationError(EmdatGeoError):
    """Input is well formed but violates a data invariant."""

    kind = "validation"


class ConfigurationError(EmdatGeoError):
    """Caller supplied an unknown column, option or inconsistent setting."""

    kind = "configuration"


class GeoNamesError(EmdatGeoError):
    """The GeoNames service answered with a non-quota error status."""

    kind = "service"


class TransientServiceError(GeoNamesError):
    """Transport failure that survived every retry attempt."""

    kind = "transport"


class QuotaExhaustedError(GeoNamesError):
    """GeoNames reported that the account's hourly/daily credits are spent.

    ``resume_index`` is filled in by the geocoder: it is the position of the
    first row that was not geocoded, so a rerun can start from there.
    ``completed`` holds the rows finished before the failure.
    """

    kind = "quota"

    def __init__(self, message, *, status_value=None, resume_index=None, completed=None):
        super().__init__(message)
        self.status_value = status_value
        self.resume_index = resume_index
        self.completed = list(completed) if completed is not None else []

    def __str__(self):
        msg = super().__str__()
        if self.resume_index is not None:
            msg += f" (resume from row index {self.resume_index})"
        return msg
