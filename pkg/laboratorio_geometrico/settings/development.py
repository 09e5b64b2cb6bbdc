"""
Configurações de desenvolvimento para o projeto laboratorio_geometrico.

Herda as configurações base; banco SQLite local e logs mais verbosos.
"""

from .base import *

# Database - SQLite local guarda o histórico de execuções
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

# Logging mais verboso para desenvolvimento
LOGGING['loggers']['laboratorio']['level'] = 'DEBUG'
