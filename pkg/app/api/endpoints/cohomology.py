from typing import Optional

from fastapi import APIRouter, Depends, Query, status

from app.api.deps import get_report_service, to_http_error
from app.core.exceptions import DhymError
from app.schemas.api import ApiResponse
from app.schemas.manifold import ManifoldFile
from app.schemas.reports import GammaTrackReport
from app.services.reports import ReportService

router = APIRouter()


@router.post("/gamma-track", response_model=ApiResponse[GammaTrackReport])
async def gamma_track(
    manifold: ManifoldFile,
    samples: Optional[int] = Query(default=None, ge=2),
    reports: ReportService = Depends(get_report_service),
) -> ApiResponse[GammaTrackReport]:
    """
    Track gamma(t) on [0, 1]; an obstruction is reported in the body, not as an error.
    """
    try:
        report, _ = reports.gamma_track(manifold, samples)
    except (DhymError, ValueError, ArithmeticError) as e:
        raise to_http_error(e)
    message = "Obstruction detected" if report.obstruction else "Branch lifted"
    return ApiResponse(data=report, status=status.HTTP_200_OK, message=message)
