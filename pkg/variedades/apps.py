from django.apps import AppConfig


class VariedadesConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "variedades"
    verbose_name = "Variedades modelo"
