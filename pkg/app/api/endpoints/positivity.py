from fastapi import APIRouter, Depends, Query, status

from app.api.deps import get_report_service, to_http_error
from app.core.exceptions import DegenerateAngle, DhymError
from app.schemas.api import ApiResponse
from app.schemas.manifold import ManifoldFile
from app.schemas.reports import CjyReport, CounterexampleReport
from app.services.reports import ReportService

router = APIRouter()


@router.post("/cjy-check", response_model=ApiResponse[CjyReport])
async def cjy_check(
    manifold: ManifoldFile,
    tmax: float = Query(default=10.0, gt=0.0),
    reports: ReportService = Depends(get_report_service),
) -> ApiResponse[CjyReport]:
    try:
        report = reports.cjy_check(manifold, tmax)
    except (DhymError, ValueError, ArithmeticError) as e:
        raise to_http_error(e)
    if report.degenerate:
        raise to_http_error(
            DegenerateAngle(f"Arg = {report.verdict.arg!r} is an endpoint of (0, pi)")
        )
    message = "Class is in P" if report.verdict.in_p else "Class is not in P"
    return ApiResponse(data=report, status=status.HTTP_200_OK, message=message)


@router.get("/counterexample", response_model=ApiResponse[CounterexampleReport])
async def counterexample(
    n: int = Query(default=3, ge=1),
    A: float = Query(default=-1.0),
    reports: ReportService = Depends(get_report_service),
) -> ApiResponse[CounterexampleReport]:
    """
    Classify omega = A chi on a generic torus of dimension n.
    """
    try:
        report = reports.counterexample(n, [A])
    except (DhymError, ValueError, ArithmeticError) as e:
        raise to_http_error(e)
    message = (
        "Counterexample confirmed" if report.counterexample_found else "No counterexample"
    )
    return ApiResponse(data=report, status=status.HTTP_200_OK, message=message)
