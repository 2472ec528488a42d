from fastapi import APIRouter, Depends, status

from app.api.deps import get_report_service, to_http_error
from app.core.exceptions import DhymError
from app.schemas.api import ApiResponse
from app.schemas.manifold import ManifoldFile
from app.schemas.reports import AngleReport
from app.services.reports import ReportService

router = APIRouter()


@router.post("/angle", response_model=ApiResponse[AngleReport])
async def class_angle(
    manifold: ManifoldFile,
    reports: ReportService = Depends(get_report_service),
) -> ApiResponse[AngleReport]:
    """
    Principal argument of int (omega + i chi)^n and the supercritical flag.
    """
    try:
        report = reports.angle(manifold)
    except (DhymError, ValueError, ArithmeticError) as e:
        raise to_http_error(e)
    return ApiResponse(data=report, status=status.HTTP_200_OK, message="Angle computed")
