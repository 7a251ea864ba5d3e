from django.apps import AppConfig


class StrategiesConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'strategies'
    verbose_name = "Estrategias de combinación de pasadas"
