from django.apps import AppConfig


class SchedulerConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "src.apps.scheduler"
    verbose_name = "Goal matching and task scheduling"
