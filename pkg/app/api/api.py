from fastapi import APIRouter

from app.api.endpoints import angles, cohomology, positivity, torus

api_router = APIRouter()

api_router.include_router(angles.router, tags=["angles"])
api_router.include_router(cohomology.router, tags=["cohomology"])
api_router.include_router(positivity.router, tags=["positivity"])
api_router.include_router(torus.router, tags=["torus"])
