"""Settings for unattended benchmark and training hosts."""

from .base import *

from decouple import config


# General
# ------------------------------------------------------------------------------

DEBUG = False
SECRET_KEY = config("DJANGO_SECRET_KEY", default="toafield-batch")


#  Databases
# ------------------------------------------------------------------------------

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": config("TOAFIELD_DB"),
    },
}


# Logging
# ------------------------------------------------------------------------------

LOGGING["loggers"]["src.apps"]["level"] = config("TOAFIELD_LOG_LEVEL", default="WARNING")
