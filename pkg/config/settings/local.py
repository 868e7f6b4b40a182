"""Local project settings."""

from .base import *

from decouple import config


# General
# ------------------------------------------------------------------------------

DEBUG = True
SECRET_KEY = config("DJANGO_SECRET_KEY", default="toafield-local")
