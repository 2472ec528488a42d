from typing import Any, List, Optional

from fastapi import status

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_DEGENERATE = 3
EXIT_OBSTRUCTION = 4
EXIT_NOT_CONVERGED = 5


class DhymError(Exception):
    """Base error; carries the CLI exit code and the HTTP status it maps to."""

    exit_code: int = EXIT_INPUT_ERROR
    status_code: int = status.HTTP_422_UNPROCESSABLE_ENTITY

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "detail": self.detail}


# Input errors


class NotHermitian(DhymError):
    pass


class NotPositiveDefinite(DhymError):
    pass


class BadIndexSet(DhymError):
    pass


class SizeMismatch(DhymError):
    pass


class WrongDimension(DhymError):
    pass


class UndefinedCotangent(DhymError):
    pass


class NotSupercritical(DhymError):
    pass


class ManifoldFileError(DhymError):
    pass


class MetricDegenerate(DhymError):
    def __init__(self, detail: str, point: Optional[tuple] = None):
        super().__init__(detail)
        self.point = point


# Degenerate data


class ZeroVolume(DhymError):
    exit_code = EXIT_DEGENERATE


class DegenerateAngle(DhymError):
    exit_code = EXIT_DEGENERATE


# Obstructions


class RootOnPath(DhymError):
    exit_code = EXIT_OBSTRUCTION
    status_code = status.HTTP_409_CONFLICT

    def __init__(self, t: float, detail: Optional[str] = None):
        super().__init__(detail or f"gamma vanishes on the path at t={t!r}")
        self.t = t


class AngleRangeViolation(DhymError):
    exit_code = EXIT_OBSTRUCTION
    status_code = status.HTTP_409_CONFLICT

    def __init__(self, detail: str, report: Any = None):
        super().__init__(detail)
        self.report = report


# Non-convergence


class NotConverged(DhymError):
    exit_code = EXIT_NOT_CONVERGED
    status_code = status.HTTP_500_INTERNAL_SERVER_ERROR

    def __init__(self, detail: str, report: Any = None):
        super().__init__(detail)
        self.report = report


class ContinuationStalled(DhymError):
    exit_code = EXIT_NOT_CONVERGED
    status_code = status.HTTP_500_INTERNAL_SERVER_ERROR

    def __init__(self, s: float, reports: Optional[List[Any]] = None):
        super().__init__(f"continuation stalled at psi_amplitude={s!r}")
        self.s = s
        self.reports = reports or []
