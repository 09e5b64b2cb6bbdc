"""
WSGI config for laboratorio_geometrico project.

It exposes the WSGI callable as a module-level variable named ``application``.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "laboratorio_geometrico.settings")

application = get_wsgi_application()
