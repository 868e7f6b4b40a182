# Generated by Django 5.2.4 on 2026-10-18 09:20

import django.db.models.deletion
import uuid
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="BenchRun",
            fields=[
                (
                    "id",
                    models.UUIDField(
                        default=uuid.uuid4,
                        editable=False,
                        primary_key=True,
                        serialize=False,
                    ),
                ),
                ("config_hash", models.CharField(db_index=True, max_length=64)),
                (
                    "planner",
                    models.CharField(
                        choices=[
                            ("field", "Time-of-arrival field from the demonstration"),
                            ("field-ad", "Auto-decoded time-of-arrival field"),
                            ("straight", "Straight-line baseline"),
                        ],
                        max_length=16,
                    ),
                ),
                ("window", models.FloatField()),
                ("scene_count", models.PositiveIntegerField()),
                ("success_rate", models.FloatField()),
                ("mean_unsmoothness", models.FloatField(blank=True, null=True)),
                ("mean_safety", models.FloatField(blank=True, null=True)),
                ("mean_rmsc", models.FloatField(blank=True, null=True)),
                ("created_at", models.DateTimeField(auto_now_add=True)),
            ],
            options={
                "ordering": ["-created_at"],
                "indexes": [
                    models.Index(fields=["-created_at"], name="metrics_run_created_idx")
                ],
            },
        ),
        migrations.CreateModel(
            name="SceneRecord",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("scene_id", models.CharField(max_length=64)),
                ("seed", models.IntegerField()),
                ("success", models.BooleanField()),
                ("unsmoothness", models.FloatField(blank=True, null=True)),
                ("safety", models.FloatField(blank=True, null=True)),
                ("rmsc", models.FloatField(blank=True, null=True)),
                ("diagnostic", models.TextField(blank=True)),
                (
                    "run",
                    models.ForeignKey(
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="scenes",
                        to="metrics.benchrun",
                    ),
                ),
            ],
            options={
                "ordering": ["run", "seed"],
                "constraints": [
                    models.UniqueConstraint(
                        fields=("run", "scene_id"), name="unique_scene_per_run"
                    )
                ],
            },
        ),
    ]
