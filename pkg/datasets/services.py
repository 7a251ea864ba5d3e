from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from django.core.exceptions import ValidationError

from core.exceptions import DatasetParseError
from core.itemsets import Itemset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransactionDb:
    """
    Base de transacciones recodificada.
    transactions: tuplas estrictamente ascendentes de ItemId.
    labels: ItemId -> etiqueta externa (entero del archivo FIMI).
    """
    transactions: tuple[Itemset, ...]
    labels: tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return len(self.transactions)

    @property
    def item_count(self) -> int:
        return len(self.labels)

    @cached_property
    def ids_by_label(self) -> dict[int, int]:
        return {label: item for item, label in enumerate(self.labels)}

    def to_labels(self, itemset: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.labels[i] for i in itemset)

    def from_labels(self, labels: Iterable[int]) -> Itemset:
        """
        Inversa de to_labels. Etiquetas desconocidas -> KeyError.
        """
        return tuple(sorted(self.ids_by_label[label] for label in labels))


@dataclass(frozen=True)
class DatasetStats:
    n: int
    item_count: int
    avg_width: float


@dataclass(frozen=True)
class SplitPlan:
    lines_per_split: int
    boundaries: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.boundaries)


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    item_count: int
    avg_width: float
    seed: int = 0
    # exponente de la popularidad tipo Zipf
    zipf_exponent: float = field(default=1.0)

    def clean(self):
        if self.n < 1:
            raise ValidationError({"n": "n debe ser >= 1."})
        if self.item_count < 1:
            raise ValidationError({"item_count": "item_count debe ser >= 1."})
        if not (1 <= self.avg_width <= self.item_count):
            raise ValidationError(
                {"avg_width": "avg_width debe cumplir 1 <= avg_width <= item_count."}
            )
        if not (0 <= self.seed < 2**64):
            raise ValidationError({"seed": "seed debe ser un entero de 64 bits sin signo."})


# ---------------- Parsing ----------------

def _recode(rows: list[set[int]]) -> TransactionDb:
    # ids por etiqueta externa ascendente (no por frecuencia)
    labels = tuple(sorted(set().union(*rows))) if rows else ()
    ids = {label: item for item, label in enumerate(labels)}
    transactions = tuple(
        tuple(sorted(ids[label] for label in row))
        for row in rows
    )
    return TransactionDb(transactions=transactions, labels=labels)


def parse_fimi(stream: str | Iterable[str]) -> TransactionDb:
    """
    Lee formato FIMI: una transacción por línea, etiquetas enteras no
    negativas separadas por espacios. Las líneas vacías se saltan y los
    duplicados dentro de una línea se descartan.
    """
    lines = stream.splitlines() if isinstance(stream, str) else stream

    rows: list[set[int]] = []
    for lineno, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens:
            continue
        row = set()
        for token in tokens:
            if not (token.isascii() and token.isdigit()):
                raise DatasetParseError(lineno, token)
            row.add(int(token))
        rows.append(row)

    return _recode(rows)


def load_fimi(path: str | Path) -> TransactionDb:
    path = Path(path)
    with path.open("r", encoding="ascii") as fh:
        db = parse_fimi(fh)
    logger.info("Dataset %s: %d transacciones, %d items", path.name, db.n, db.item_count)
    return db


def serialize_fimi(db: TransactionDb) -> str:
    return "".join(
        " ".join(str(label) for label in db.to_labels(t)) + "\n"
        for t in db.transactions
    )


# ---------------- Estadísticas y splits ----------------

def stats(db: TransactionDb) -> DatasetStats:
    if db.n == 0:
        return DatasetStats(n=0, item_count=0, avg_width=0.0)
    total = sum(len(t) for t in db.transactions)
    return DatasetStats(n=db.n, item_count=db.item_count, avg_width=total / db.n)


def make_splits(db: TransactionDb, lines_per_split: int) -> SplitPlan:
    """
    Rangos semiabiertos [inicio, fin) que cubren [0, n); todos de tamaño
    lines_per_split salvo, quizá, el último.
    """
    if lines_per_split < 1:
        raise ValidationError(
            {"lines_per_split": "lines_per_split debe ser >= 1."},
        )
    count = math.ceil(db.n / lines_per_split)
    boundaries = tuple(
        (i * lines_per_split, min((i + 1) * lines_per_split, db.n))
        for i in range(count)
    )
    return SplitPlan(lines_per_split=lines_per_split, boundaries=boundaries)


def split_transactions(db: TransactionDb, plan: SplitPlan) -> list[tuple[Itemset, ...]]:
    return [db.transactions[start:end] for start, end in plan.boundaries]


# ---------------- Generador sintético ----------------

def generate_synthetic(config: GeneratorConfig) -> TransactionDb:
    """
    Dataset sintético determinista para pruebas de escala.

    Ancho: 1 + Poisson(avg_width - 1), recortado a [1, item_count], así el
    ancho esperado es avg_width salvo por el recorte superior.
    Items: sin reemplazo, con popularidad Zipf (p_i ~ 1 / (i+1)^s).
    No replica al generador IBM Quest.
    """
    config.clean()

    rng = np.random.default_rng(config.seed)
    ranks = np.arange(1, config.item_count + 1, dtype=np.float64)
    weights = 1.0 / np.power(ranks, config.zipf_exponent)
    weights /= weights.sum()

    widths = 1 + rng.poisson(config.avg_width - 1, size=config.n)
    widths = np.clip(widths, 1, config.item_count)

    rows = [
        {int(item) for item in rng.choice(config.item_count, size=int(w), replace=False, p=weights)}
        for w in widths
    ]
    db = _recode(rows)
    logger.debug(
        "Sintético seed=%d: %d transacciones, %d items", config.seed, db.n, db.item_count,
    )
    return db
