from django.apps import AppConfig


class PlannerConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "src.apps.planner"
    verbose_name = "Wrist trajectory extraction"
