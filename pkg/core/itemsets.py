from __future__ import annotations

from typing import Iterable, Sequence

from django.core.exceptions import ValidationError

# Itemset: tupla estrictamente ascendente de ItemId (enteros densos).
Itemset = tuple[int, ...]


def is_strictly_sorted(items: Sequence[int]) -> bool:
    return all(a < b for a, b in zip(items, items[1:]))


def as_itemset(items: Iterable[int]) -> Itemset:
    """
    Convierte a Itemset validando orden estricto (sin duplicados).
    """
    itemset = tuple(items)
    if not itemset:
        raise ValidationError("Itemset vacío.", code="empty_itemset")
    if not is_strictly_sorted(itemset):
        raise ValidationError(
            f"Itemset no ordenado o con duplicados: {itemset}.",
            code="unsorted_itemset",
        )
    return itemset


def format_itemset(itemset: Sequence[int], labels: Sequence[int] | None = None) -> str:
    if labels is not None:
        itemset = [labels[i] for i in itemset]
    return " ".join(str(i) for i in itemset)
