from django.db import models


class TimeMode(models.TextChoices):
    WALL = "wall", "Reloj de pared"
    COST = "cost", "Modelo de costo"


class EmissionMode(models.TextChoices):
    ACCUMULATE = "accumulate", "Acumular en el mapper"
    PER_MATCH = "per-match", "Un par (c, 1) por coincidencia"


class Rounding(models.TextChoices):
    CEIL = "ceil", "ceil(min_sup * n)"
    FLOOR_PLUS_ONE = "floor+1", "floor(min_sup * n) + 1"


class GenerationScope(models.TextChoices):
    TASK = "task", "Una generación por map task"
    TRANSACTION = "transaction", "Una generación por transacción"
