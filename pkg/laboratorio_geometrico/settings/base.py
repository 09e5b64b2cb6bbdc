"""
Configurações base do Django para o projeto laboratorio_geometrico.

Este arquivo contém configurações comuns a todos os ambientes, incluindo
os parâmetros numéricos padrão do laboratório (dict LABORATORIO).
"""

from pathlib import Path
import environ

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent

# Environment variables
env = environ.Env(
    DEBUG=(bool, False)
)

# Read .env file
env_file = BASE_DIR / '.env'
if env_file.exists():
    environ.Env.read_env(env_file)

SECRET_KEY = env('SECRET_KEY', default='laboratorio-geometrico-chave-local')

DEBUG = env.bool('DEBUG', default=False)

ALLOWED_HOSTS = env.list('ALLOWED_HOSTS', default=['localhost', '127.0.0.1'])

# Application definition
INSTALLED_APPS = [
    # Django apps
    "django.contrib.admin",
    "django.contrib.auth",
    "django.contrib.contenttypes",
    "django.contrib.sessions",
    "django.contrib.messages",
    "django.contrib.staticfiles",

    # Third-party apps
    "rest_framework",

    # Local apps
    "core",
    "variedades",
    "geodesicas",
    "convexidade",
    "espectral",
    "experimentos",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.contrib.sessions.middleware.SessionMiddleware",
    "django.middleware.common.CommonMiddleware",
    "django.middleware.csrf.CsrfViewMiddleware",
    "django.contrib.auth.middleware.AuthenticationMiddleware",
    "django.contrib.messages.middleware.MessageMiddleware",
    "django.middleware.clickjacking.XFrameOptionsMiddleware",
]

ROOT_URLCONF = "laboratorio_geometrico.urls"

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [
                "django.template.context_processors.debug",
                "django.template.context_processors.request",
                "django.contrib.auth.context_processors.auth",
                "django.contrib.messages.context_processors.messages",
            ],
        },
    },
]

WSGI_APPLICATION = "laboratorio_geometrico.wsgi.application"

# Database configuration will be set in environment-specific files

# Internationalization
LANGUAGE_CODE = env('LANGUAGE_CODE', default='pt-br')
TIME_ZONE = env('TIME_ZONE', default='America/Sao_Paulo')
USE_I18N = True
USE_TZ = True

STATIC_URL = "/static/"

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Django REST Framework (usado apenas para validação de configurações)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
}

# Parâmetros numéricos do laboratório
LABORATORIO = {
    'PASSO_INTEGRACAO': env.float('LAB_PASSO_INTEGRACAO', default=1e-3),
    'PASSOS_MAXIMOS_TIRO': env.int('LAB_PASSOS_MAXIMOS_TIRO', default=20000),
    'THREADS': env.int('LAB_THREADS', default=1),
    'DIRETORIO_SAIDA': env('LAB_DIRETORIO_SAIDA', default=str(BASE_DIR / 'resultados')),
    'AGENDA_ESTAVEL': env.list('LAB_AGENDA_ESTAVEL', cast=float, default=[5.0, 10.0, 15.0, 20.0, 25.0, 30.0]),
    'TOLERANCIA_ESTAVEL': env.float('LAB_TOLERANCIA_ESTAVEL', default=1e-6),
    'AGENDA_BUSEMANN': env.list('LAB_AGENDA_BUSEMANN', cast=float, default=[5.0, 10.0, 15.0, 20.0, 25.0, 30.0]),
    'TOLERANCIA_BUSEMANN': env.float('LAB_TOLERANCIA_BUSEMANN', default=1e-5),
    'RAIO_BUSEMANN': env.float('LAB_RAIO_BUSEMANN', default=5.0),
    'TOLERANCIA_TIRO': env.float('LAB_TOLERANCIA_TIRO', default=1e-10),
    'ITERACOES_TIRO': env.int('LAB_ITERACOES_TIRO', default=40),
    'PASSO_DIFERENCAS': env.float('LAB_PASSO_DIFERENCAS', default=1e-5),
    'PASSO_BUSEMANN': env.float('LAB_PASSO_BUSEMANN', default=1e-2),
    'RAIO_ESPECTRAL': env.float('LAB_RAIO_ESPECTRAL', default=12.0),
    'ORDEM_ANGULAR': env.int('LAB_ORDEM_ANGULAR', default=8),
    'DIGITOS': env.int('LAB_DIGITOS', default=17),
    'REGISTRAR_EXECUCOES': env.bool('LAB_REGISTRAR_EXECUCOES', default=True),
}

# Logging Configuration
LOGS_DIR = Path(env('LAB_DIRETORIO_LOGS', default=str(BASE_DIR / 'logs')))
LOGS_DIR.mkdir(parents=True, exist_ok=True)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'json': {
            '()': 'pythonjsonlogger.jsonlogger.JsonFormatter',
            'format': '%(asctime)s %(levelname)s %(name)s %(message)s',
        },
        'simple': {
            'format': '{levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'file': {
            'level': 'INFO',
            'class': 'logging.FileHandler',
            'filename': LOGS_DIR / 'laboratorio.jsonl',
            'formatter': 'json',
            'delay': True,
        },
        'console': {
            'level': 'WARNING',
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'INFO',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
        'laboratorio': {
            'handlers': ['file', 'console'],
            'level': 'INFO',
            'propagate': False,
        },
    },
}
