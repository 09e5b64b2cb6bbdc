from django.apps import AppConfig


class GeodesicasConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "geodesicas"
    verbose_name = "Geodésicas e campos de Jacobi"
