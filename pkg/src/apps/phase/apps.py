from django.apps import AppConfig


class PhaseConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "src.apps.phase"
    verbose_name = "Goal phase tracking"
