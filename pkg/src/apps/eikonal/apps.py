from django.apps import AppConfig


class EikonalConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "src.apps.eikonal"
    verbose_name = "Fast marching and time-of-arrival fields"
