from typing import Optional

from fastapi import APIRouter, Depends, Query, status

from app.api.deps import get_report_service, to_http_error
from app.core.exceptions import DhymError
from app.schemas.api import ApiResponse
from app.schemas.manifold import ManifoldFile
from app.schemas.reports import TorusSolveReport
from app.services.reports import ReportService

router = APIRouter()


# Plain def: the solve is CPU bound and runs in the threadpool
@router.post("/solve-torus", response_model=ApiResponse[TorusSolveReport])
def solve_torus(
    manifold: ManifoldFile,
    theta: Optional[float] = Query(default=None, description="Target constant; omit for auto"),
    grid: Optional[int] = Query(default=None, ge=4),
    steps: int = Query(default=1, ge=1),
    lifted: bool = Query(default=False),
    reports: ReportService = Depends(get_report_service),
) -> ApiResponse[TorusSolveReport]:
    try:
        report, _ = reports.solve_torus(
            manifold, theta=theta, grid=grid, steps=steps, allow_lifted=lifted
        )
    except (DhymError, ValueError, ArithmeticError) as e:
        raise to_http_error(e)
    return ApiResponse(data=report, status=status.HTTP_200_OK, message="Solver converged")
