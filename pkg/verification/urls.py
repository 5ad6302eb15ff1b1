from django.urls import path
from .views import (
    CreateRunView,
    EvalView,
    GeometryListView,
    LeviCivitaView,
    RunDetailView,
)

urlpatterns = [
    path("geometries/", GeometryListView.as_view(), name="geometry-list"),
    path("eval/", EvalView.as_view(), name="geometry-eval"),
    path("levi-civita/", LeviCivitaView.as_view(), name="levi-civita"),
    path("runs/", CreateRunView.as_view(), name="create-run"),
    path("runs/<int:run_id>/", RunDetailView.as_view(), name="run-detail"),
]
