from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from django.core.exceptions import ValidationError

from core.exceptions import TrieMismatchError
from core.itemsets import Itemset, is_strictly_sorted

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenCounters:
    """
    Contadores de una generación de candidatos.
    joins: tuplas producidas por el join.
    prune_checks: pruebas de pertenencia de (k-1)-subconjuntos.
    pruned: candidatos eliminados por la poda.
    """
    joins: int = 0
    prune_checks: int = 0
    pruned: int = 0

    def __add__(self, other: GenCounters) -> GenCounters:
        return GenCounters(
            joins=self.joins + other.joins,
            prune_checks=self.prune_checks + other.prune_checks,
            pruned=self.pruned + other.pruned,
        )

    def scaled(self, factor: int) -> GenCounters:
        return GenCounters(
            joins=self.joins * factor,
            prune_checks=self.prune_checks * factor,
            pruned=self.pruned * factor,
        )


class TrieNode:
    __slots__ = ("children", "support")

    def __init__(self):
        # claves (ItemId) en orden estrictamente ascendente
        self.children: dict[int, TrieNode] = {}
        self.support = 0


class CandidateTrie:
    """
    Árbol de prefijos con un nivel de itemsets (L_{k-1}, C_k o C'_k).

    Todas las rutas raíz-hoja miden exactamente `level`; los ids crecen a lo
    largo de cada ruta y entre hermanos. Cada hoja lleva su contador de
    soporte. Una vez congelado (`freeze`) el trie es de solo lectura y se
    comparte entre map tasks.
    """

    def __init__(self, level: int):
        if level < 1:
            raise ValidationError({"level": "level debe ser >= 1."})
        self.level = level
        self.root = TrieNode()
        self._size = 0
        self._frozen = False

    # --- estructura ---

    def __len__(self) -> int:
        return self._size

    @property
    def frozen(self) -> bool:
        return self._frozen

    def freeze(self) -> CandidateTrie:
        self._frozen = True
        return self

    def _check_mutable(self):
        if self._frozen:
            raise RuntimeError("Trie congelado: es de solo lectura.")

    def insert(self, itemset: Sequence[int]) -> bool:
        """
        Inserta un itemset; devuelve False si ya existía (semántica de
        conjunto).
        """
        self._check_mutable()
        if len(itemset) != self.level:
            raise ValidationError(
                f"Itemset de tamaño {len(itemset)} en trie de nivel {self.level}."
            )
        if not is_strictly_sorted(itemset):
            raise ValidationError(f"Itemset no ordenado: {tuple(itemset)}.")

        node = self.root
        created = False
        for item in itemset:
            child = node.children.get(item)
            if child is None:
                child = TrieNode()
                children = node.children
                if children and item < next(reversed(children)):
                    children[item] = child
                    node.children = dict(sorted(children.items()))
                else:
                    children[item] = child
                created = True
            node = child
        if created:
            self._size += 1
        return created

    def _leaf(self, itemset: Sequence[int]) -> TrieNode | None:
        if len(itemset) != self.level:
            return None
        node = self.root
        for item in itemset:
            node = node.children.get(item)
            if node is None:
                return None
        return node

    def __contains__(self, itemset: Sequence[int]) -> bool:
        return self._leaf(itemset) is not None

    def support(self, itemset: Sequence[int]) -> int:
        leaf = self._leaf(itemset)
        if leaf is None:
            raise TrieMismatchError(f"{tuple(itemset)} no está en el trie.")
        return leaf.support

    # --- recorrido ---

    def _walk(self, node: TrieNode, depth: int, prefix: Itemset) -> Iterator[tuple[Itemset, TrieNode]]:
        if depth == self.level:
            yield prefix, node
            return
        for item, child in node.children.items():
            yield from self._walk(child, depth + 1, prefix + (item,))

    def __iter__(self) -> Iterator[Itemset]:
        """Itemsets en orden lexicográfico de ItemId."""
        for itemset, _ in self._walk(self.root, 0, ()):
            yield itemset

    def items(self) -> Iterator[tuple[Itemset, int]]:
        for itemset, leaf in self._walk(self.root, 0, ()):
            yield itemset, leaf.support

    def prefix_groups(self) -> Iterator[tuple[Itemset, TrieNode]]:
        """
        Nodos de profundidad level-1 (padres de hojas) con su prefijo.
        Sus hijos son los itemsets que comparten los primeros level-1 items.
        """
        yield from self._walk_to(self.root, 0, self.level - 1, ())

    def _walk_to(self, node, depth, target, prefix):
        if depth == target:
            yield prefix, node
            return
        for item, child in node.children.items():
            yield from self._walk_to(child, depth + 1, target, prefix + (item,))

    def dump(self) -> str:
        """Formato de depuración: itemset, tabulador, soporte."""
        return "".join(
            " ".join(str(i) for i in itemset) + f"\t{support}\n"
            for itemset, support in self.items()
        )

    # --- conteo ---

    def add_support(self, itemset: Sequence[int], delta: int = 1) -> CandidateTrie:
        if delta <= 0:
            raise ValidationError({"delta": "delta debe ser positivo."})
        self._check_mutable()
        leaf = self._leaf(itemset)
        if leaf is None:
            raise TrieMismatchError(f"{tuple(itemset)} no está en el trie.")
        leaf.support += delta
        return self

    def match(self, transaction: Sequence[int], on_leaf: Callable[[Itemset, TrieNode], None]) -> int:
        """
        Llama on_leaf por cada itemset del trie contenido en la transacción.
        Devuelve el número de nodos visitados.
        """
        if len(transaction) < self.level:
            return 0
        return self._match(self.root, transaction, 0, self.level, (), on_leaf)

    def _match(self, node, t, start, remaining, prefix, on_leaf) -> int:
        visits = 0
        children = node.children
        stop = len(t) - remaining + 1
        for i in range(start, stop):
            item = t[i]
            child = children.get(item)
            if child is None:
                continue
            visits += 1
            path = prefix + (item,)
            if remaining == 1:
                on_leaf(path, child)
            else:
                visits += self._match(child, t, i + 1, remaining - 1, path, on_leaf)
        return visits


# ---------------- Operaciones ----------------

def trie_from_itemsets(itemsets: Iterable[Sequence[int]], level: int | None = None) -> CandidateTrie:
    """
    Construye un trie con exactamente el conjunto dado (contadores en cero).
    `level` es obligatorio sólo si la colección puede venir vacía.
    """
    itemsets = sorted(tuple(s) for s in itemsets)
    sizes = {len(s) for s in itemsets}
    if len(sizes) > 1:
        raise ValidationError(f"Itemsets de tamaños mezclados: {sorted(sizes)}.")
    if sizes:
        size = sizes.pop()
        if level is not None and level != size:
            raise ValidationError(f"Nivel {level} no coincide con itemsets de tamaño {size}.")
        level = size
    if level is None:
        level = 1

    trie = CandidateTrie(level)
    for itemset in itemsets:
        trie.insert(itemset)
    return trie


def _generate(prev: CandidateTrie, prune: bool) -> tuple[CandidateTrie, GenCounters]:
    """
    Join sobre hermanos bajo un prefijo común de profundidad k-2.
    Con prune, se prueban sólo los k-2 subconjuntos que el join no
    garantiza, y se corta en el primero ausente.
    """
    k = prev.level + 1
    out = CandidateTrie(k)
    joins = prune_checks = pruned = 0

    for prefix, parent in prev.prefix_groups():
        siblings = list(parent.children)
        for i, first in enumerate(siblings):
            for second in siblings[i + 1:]:
                joins += 1
                candidate = prefix + (first, second)
                if prune:
                    tail = (first, second)
                    for drop in range(k - 2):
                        prune_checks += 1
                        subset = prefix[:drop] + prefix[drop + 1:] + tail
                        if subset not in prev:
                            pruned += 1
                            break
                    else:
                        out.insert(candidate)
                else:
                    out.insert(candidate)

    counters = GenCounters(joins=joins, prune_checks=prune_checks, pruned=pruned)
    logger.debug("gen k=%d prune=%s -> %d candidatos (%s)", k, prune, len(out), counters)
    return out, counters


def apriori_gen(prev: CandidateTrie) -> tuple[CandidateTrie, GenCounters]:
    return _generate(prev, prune=True)


def non_apriori_gen(prev: CandidateTrie) -> tuple[CandidateTrie, GenCounters]:
    """Sólo join: conserva los candidatos que la poda eliminaría."""
    return _generate(prev, prune=False)


def subset_match(trie: CandidateTrie, transaction: Sequence[int]) -> tuple[list[Itemset], int]:
    """
    Itemsets del trie contenidos en la transacción y nodos visitados.
    """
    matched: list[Itemset] = []
    visits = trie.match(transaction, lambda itemset, _leaf: matched.append(itemset))
    return matched, visits


def add_support(trie: CandidateTrie, itemset: Sequence[int], delta: int = 1) -> CandidateTrie:
    return trie.add_support(itemset, delta)
