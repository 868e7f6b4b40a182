from django.apps import AppConfig


class AutodecoderConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "src.apps.autodecoder"
    verbose_name = "Implicit field auto-decoder"
