import uuid

from django.db import models, transaction

from .constants import BenchPlanner


class BenchRun(models.Model):
    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    config_hash = models.CharField(max_length=64, db_index=True)
    planner = models.CharField(max_length=16, choices=BenchPlanner.choices)
    window = models.FloatField()
    scene_count = models.PositiveIntegerField()
    success_rate = models.FloatField()
    mean_unsmoothness = models.FloatField(null=True, blank=True)
    mean_safety = models.FloatField(null=True, blank=True)
    mean_rmsc = models.FloatField(null=True, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["-created_at"]
        indexes = [
            models.Index(fields=["-created_at"], name="metrics_run_created_idx"),
        ]

    def __str__(self):
        return f"{self.planner} {self.config_hash[:12]}: {self.success_rate:.1f}% of {self.scene_count}"

    @classmethod
    def record(cls, report, run_config):
        """
        Store ``report`` and its scene records under the config hash that
        produced them.
        """
        aggregate = report.aggregate()
        with transaction.atomic():
            run = cls.objects.create(
                config_hash=run_config.digest,
                planner=report.planner,
                window=report.window,
                scene_count=aggregate["scenes"],
                success_rate=aggregate["success_rate"],
                mean_unsmoothness=aggregate["unsmoothness"],
                mean_safety=aggregate["safety"],
                mean_rmsc=aggregate["rmsc"],
            )
            SceneRecord.objects.bulk_create([
                SceneRecord(
                    run=run,
                    scene_id=result.scene_id,
                    seed=result.seed,
                    success=result.success,
                    unsmoothness=result.unsmoothness,
                    safety=result.safety,
                    rmsc=result.rmsc,
                    diagnostic=result.diagnostic,
                )
                for result in report.records
            ])
        return run

    def previous(self):
        """
        The latest earlier run with the same config hash, if any.
        """
        return (
            BenchRun.objects.filter(config_hash=self.config_hash, created_at__lte=self.created_at)
            .exclude(pk=self.pk)
            .order_by("-created_at")
            .first()
        )


class SceneRecord(models.Model):
    run = models.ForeignKey(BenchRun, on_delete=models.CASCADE, related_name="scenes")
    scene_id = models.CharField(max_length=64)
    seed = models.IntegerField()
    success = models.BooleanField()
    unsmoothness = models.FloatField(null=True, blank=True)
    safety = models.FloatField(null=True, blank=True)
    rmsc = models.FloatField(null=True, blank=True)
    diagnostic = models.TextField(blank=True)

    class Meta:
        ordering = ["run", "seed"]
        constraints = [
            models.UniqueConstraint(fields=["run", "scene_id"], name="unique_scene_per_run"),
        ]

    def __str__(self):
        return f"{self.scene_id}: {'success' if self.success else self.diagnostic or 'failure'}"
