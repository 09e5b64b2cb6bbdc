from django.apps import AppConfig


class ConvexidadeConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "convexidade"
    verbose_name = "Funções convexas e certificados"
