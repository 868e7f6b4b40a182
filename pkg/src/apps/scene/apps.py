from django.apps import AppConfig


class SceneConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "src.apps.scene"
    verbose_name = "Scenes, voxel grids and procedural layouts"
