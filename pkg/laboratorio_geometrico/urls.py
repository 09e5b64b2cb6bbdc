"""
URL configuration for laboratorio_geometrico project.

Apenas o admin: o histórico de execuções é consultado por lá.
"""

from django.contrib import admin
from django.urls import path

urlpatterns = [
    path("admin/", admin.site.urls),
]
