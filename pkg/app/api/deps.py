from functools import lru_cache

from fastapi import HTTPException
from pydantic import ValidationError

from app.core.exceptions import DhymError
from app.services.reports import ReportService


@lru_cache
def get_report_service() -> ReportService:
    """One shared service so torus grids and Fourier symbols are reused across requests."""
    return ReportService()


def to_http_error(e: Exception) -> HTTPException:
    """Map toolkit errors onto the HTTP status they carry."""
    if isinstance(e, DhymError):
        return HTTPException(status_code=e.status_code, detail=e.to_dict())
    if isinstance(e, ValidationError):
        return HTTPException(
            status_code=422,
            detail={"error": "ValidationError", "detail": str(e)},
        )
    return HTTPException(
        status_code=400, detail={"error": type(e).__name__, "detail": str(e)}
    )
