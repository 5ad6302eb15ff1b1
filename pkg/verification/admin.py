from django.contrib import admin
from .models import GeometryRun


@admin.register(GeometryRun)
class GeometryRunAdmin(admin.ModelAdmin):
    list_display = [
        "id",
        "geometry",
        "command",
        "suite",
        "seed",
        "status",
        "created_at",
        "finished_at",
    ]
    list_filter = ["status", "command", "suite"]
    ordering = ["-created_at"]
    readonly_fields = ["spec_hash", "report", "error", "created_at", "finished_at"]
