from django.db import models


class GeometryRun(models.Model):
    COMMAND_CHOICES = [
        ("check", "Check"),
        ("levi-civita", "Levi-Civita"),
    ]
    SUITE_CHOICES = [
        ("cartan", "Cartan calculus"),
        ("connection", "Connections"),
        ("riemann", "Riemannian"),
        ("all", "All"),
    ]
    STATUS_CHOICES = [
        ("pending", "Pending"),
        ("running", "Running"),
        ("passed", "Passed"),
        ("failed", "Failed"),
        ("error", "Error"),
    ]

    geometry = models.CharField(max_length=100)
    command = models.CharField(max_length=20, choices=COMMAND_CHOICES, default="check")
    suite = models.CharField(max_length=20, choices=SUITE_CHOICES, default="all")
    seed = models.IntegerField(default=0)
    spec_hash = models.CharField(max_length=64, blank=True, default="")
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default="pending")
    report = models.JSONField(null=True, blank=True)
    error = models.TextField(blank=True, default="")
    created_at = models.DateTimeField(auto_now_add=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        ordering = ["-created_at"]

    def __str__(self):
        return f"Run #{self.id} {self.command} {self.geometry} - {self.status}"
