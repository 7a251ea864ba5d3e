from django.db import models


class Variant(models.TextChoices):
    SPC = "spc", "SPC"
    FPC = "fpc", "FPC"
    DPC = "dpc", "DPC"
    VFPC = "vfpc", "VFPC"
    ETDPC = "etdpc", "ETDPC"


# Variantes que admiten la poda omitida (Optimized-*)
OPTIMIZABLE = (Variant.VFPC, Variant.ETDPC)


class PassMode(models.TextChoices):
    PRUNED = "PRUNED", "apriori-gen"
    UNPRUNED = "UNPRUNED", "non-apriori-gen"
