from rest_framework import serializers
from .models import GeometryRun

GEOMETRY_NAME_REGEX = r"^[a-z0-9_]+$"


class GeometryRunSerializer(serializers.ModelSerializer):
    class Meta:
        model = GeometryRun
        fields = [
            "id",
            "geometry",
            "command",
            "suite",
            "seed",
            "spec_hash",
            "status",
            "report",
            "error",
            "created_at",
            "finished_at",
        ]
        read_only_fields = [
            "id",
            "command",
            "spec_hash",
            "status",
            "report",
            "error",
            "created_at",
            "finished_at",
        ]


class CreateRunSerializer(serializers.Serializer):
    geometry = serializers.RegexField(GEOMETRY_NAME_REGEX, max_length=100)
    suite = serializers.ChoiceField(
        choices=[choice for choice, _ in GeometryRun.SUITE_CHOICES], default="all"
    )
    seed = serializers.IntegerField(required=False, min_value=0)


class EvalSerializer(serializers.Serializer):
    geometry = serializers.RegexField(GEOMETRY_NAME_REGEX, max_length=100)
    expr = serializers.CharField(max_length=2000)


class LeviCivitaSerializer(serializers.Serializer):
    geometry = serializers.RegexField(GEOMETRY_NAME_REGEX, max_length=100)
