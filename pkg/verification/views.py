from rest_framework.views import APIView
from rest_framework.response import Response
from rest_framework import status
from django.conf import settings
from django.core.cache import cache

from geometry.exceptions import GeometryError, SolverError, SpecError
from geometry.loader import shipped_geometries
from .models import GeometryRun
from .serializers import (
    CreateRunSerializer,
    EvalSerializer,
    GeometryRunSerializer,
    LeviCivitaSerializer,
)
from .tasks import run_check_suite
from . import pipeline

GEOMETRIES_CACHE_KEY = "shipped_geometries"


def _load_or_error(name):
    """(spec, None) or (None, error Response)."""
    try:
        return pipeline.load(name), None
    except FileNotFoundError:
        return None, Response(
            {"error": f"Geometry {name!r} not found"}, status=status.HTTP_404_NOT_FOUND
        )
    except SpecError as e:
        return None, Response({"error": str(e)}, status=status.HTTP_400_BAD_REQUEST)


class GeometryListView(APIView):
    """
    List the shipped geometries.

    The list is cached; it only changes when .geo files are deployed.
    """

    def get(self, request):
        cached = cache.get(GEOMETRIES_CACHE_KEY)
        if cached is not None:
            return Response(cached)

        names = shipped_geometries(settings.GEOMETRY_DIR)
        cache.set(GEOMETRIES_CACHE_KEY, names, None)
        return Response(names)


class EvalView(APIView):
    """
    Evaluate an algebra expression in a geometry.

    Expected input:
    - geometry: Shipped geometry name (e.g. "moyal_plane")
    - expr: Expression, e.g. "star(x1, x2)" or "1 + h*x1"
    """

    def post(self, request):
        serializer = EvalSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        spec, error = _load_or_error(serializer.validated_data["geometry"])
        if error:
            return error
        try:
            result = pipeline.run_eval(spec, serializer.validated_data["expr"])
        except GeometryError as e:
            return Response({"error": str(e)}, status=status.HTTP_400_BAD_REQUEST)
        return Response(result)


class LeviCivitaView(APIView):
    """
    Solve for the Levi-Civita connection of a geometry's metric.

    Expected input:
    - geometry: Shipped geometry name

    Returns Christoffel, curvature, torsion and Ricci tables with residuals.
    """

    def post(self, request):
        serializer = LeviCivitaSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        spec, error = _load_or_error(serializer.validated_data["geometry"])
        if error:
            return error
        try:
            report = pipeline.run_levi_civita(spec, probes=0)
        except SolverError as e:
            return Response(
                {"error": str(e), "residuals": e.residuals.get("residuals", {})},
                status=status.HTTP_400_BAD_REQUEST,
            )
        return Response(report)


class CreateRunView(APIView):
    """
    Record and execute a check run.

    Expected input:
    - geometry: Shipped geometry name
    - suite: "cartan", "connection", "riemann" or "all" (default: all)
    - seed: Sample seed (optional, default from the geometry file, then settings)

    Runs inline unless GEOMETRY_ASYNC_CHECKS is set, in which case the run is
    queued on Celery and returned as pending.
    """

    def post(self, request):
        serializer = CreateRunSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        data = serializer.validated_data
        spec, error = _load_or_error(data["geometry"])
        if error:
            return error

        seed = data.get("seed")
        run = GeometryRun.objects.create(
            geometry=data["geometry"],
            suite=data["suite"],
            seed=pipeline.default_seed(spec) if seed is None else seed,
        )
        if settings.GEOMETRY_ASYNC_CHECKS:
            run_check_suite.delay(run.id)
            return Response(
                GeometryRunSerializer(run).data, status=status.HTTP_202_ACCEPTED
            )

        run_check_suite(run.id)
        run.refresh_from_db()
        return Response(GeometryRunSerializer(run).data, status=status.HTTP_201_CREATED)


class RunDetailView(APIView):
    """
    Retrieve a check run with its report.
    """

    def get(self, request, run_id):
        try:
            run = GeometryRun.objects.get(id=run_id)
        except GeometryRun.DoesNotExist:
            return Response({"error": "Run not found"}, status=status.HTTP_404_NOT_FOUND)
        return Response(GeometryRunSerializer(run).data)
