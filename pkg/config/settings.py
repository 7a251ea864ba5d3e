"""
Django settings for config project.

Proyecto sin superficie web: Django aporta la configuración, los comandos
de administración (`manage.py run|verify|report|cost|generate|stats`),
el logging y el runner de pruebas.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import os
import sys
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get("SECRET_KEY", "dev-insecure")

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # Third party
    "rest_framework",

    # Local apps
    "core",
    "datasets",
    "candidates",
    "engine",
    "strategies",
    "oracle",
    "cli",
]

# Sin base de datos real: los reportes viven en archivos (--out-file).
DATABASES = {}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True


# Logging
# https://docs.djangoproject.com/en/4.2/topics/logging/

# `manage.py test` deja solo advertencias de las apps del proyecto.
TESTING = sys.argv[1:2] == ["test"]
MINING_LOG_LEVEL = "WARNING" if TESTING else "INFO"

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "mining": {
            "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "mining",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "django": {"handlers": ["console"], "level": "WARNING", "propagate": False},
        "datasets": {"level": MINING_LOG_LEVEL},
        "candidates": {"level": MINING_LOG_LEVEL},
        "engine": {"level": MINING_LOG_LEVEL},
        "strategies": {"level": MINING_LOG_LEVEL},
        "oracle": {"level": MINING_LOG_LEVEL},
        "cli": {"level": MINING_LOG_LEVEL},
    },
}


# Minería de itemsets frecuentes
#
# Valores por omisión; los flags de los comandos los sobreescriben por
# invocación. Los tiempos (betas) están en ticks: segundos en modo "wall",
# unidades del modelo de costo en modo "cost".

MINING = {
    "LINES_PER_SPLIT": 1000,
    "WORKERS": 1,
    "NUM_REDUCERS": 1,
    "TIME_MODE": "wall",
    # ticks por: par emitido, join, prueba de poda, nodo visitado en subset
    "COST_COEFFICIENTS": (2e-5, 1e-5, 2e-5, 2e-6),
    "THRESHOLD_ROUNDING": "ceil",
    "EMISSION_MODE": "accumulate",
    "GENERATION_SCOPE": "task",
    "FPC_WIDTH": 3,
    "FPC_START": 3,
    "DPC_ALPHA_HIGH": 2.0,
    "DPC_BETA": 60.0,
    "ETDPC_BETA1": 40.0,
    "ETDPC_BETA2": 60.0,
    # trabajo máximo (transacciones x candidatos) por nivel del oráculo
    "ORACLE_BUDGET": 2_000_000_000,
    "DATASET_DIR": BASE_DIR / "data",
}
