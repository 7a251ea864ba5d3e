from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from django.core.exceptions import ValidationError

from candidates.trie import CandidateTrie, GenCounters, apriori_gen, non_apriori_gen
from core.itemsets import Itemset
from engine.models import EmissionMode
from engine.services import MapContext, MapOutput
from strategies.models import PassMode


# ---------------- Reglas de corte ----------------

@dataclass(frozen=True)
class FixedPasses:
    """SPC / FPC / VFPC: npass fijo por fase."""
    npass: int

    def done(self, passes: int, candidate_count: int) -> bool:
        return passes >= self.npass


@dataclass(frozen=True)
class CandidateThreshold:
    """DPC / ETDPC: do-while(candidateCount <= ct)."""
    ct: float

    def done(self, passes: int, candidate_count: int) -> bool:
        return candidate_count > self.ct


StopRule = Union[FixedPasses, CandidateThreshold]


# ---------------- Conteo ----------------

def _count_split(
    trie: CandidateTrie,
    split: Sequence[Itemset],
    emission_mode: str,
    pairs: list[tuple[Itemset, int]],
) -> tuple[int, int]:
    """
    Cuenta el soporte de los candidatos del trie en el split.
    accumulate: suma en las hojas y emite (c, n) al cerrar el mapper.
    per-match: emite (c, 1) por coincidencia.
    Devuelve (emisiones lógicas, nodos visitados).
    """
    if emission_mode == EmissionMode.PER_MATCH:
        start = len(pairs)

        def on_leaf(itemset, leaf):
            pairs.append((itemset, 1))

        visits = sum(trie.match(t, on_leaf) for t in split)
        return len(pairs) - start, visits

    def on_leaf(itemset, leaf):
        leaf.support += 1

    visits = sum(trie.match(t, on_leaf) for t in split)
    counted = [(itemset, support) for itemset, support in trie.items() if support > 0]
    pairs.extend(counted)
    return sum(support for _, support in counted), visits


# ---------------- Mappers ----------------

def one_itemset_mapper(
    split: Sequence[Itemset],
    broadcast: Optional[CandidateTrie],
    emission_mode: str,
) -> MapOutput:
    """Job1: write (I, 1) por item de cada transacción."""
    emitted = sum(len(t) for t in split)
    if emission_mode == EmissionMode.PER_MATCH:
        pairs = [((item,), 1) for t in split for item in t]
    else:
        counts: dict[Itemset, int] = defaultdict(int)
        for t in split:
            for item in t:
                counts[(item,)] += 1
        pairs = list(counts.items())

    context = MapContext(
        candidate_count=0,
        npass=1,
        per_level_candidates=(0,),
        modes=(PassMode.PRUNED.value,),
        per_level_gen=(GenCounters(),),
    )
    return MapOutput(pairs=pairs, context=context, emitted_pairs=emitted)


def multi_pass_mapper(
    split: Sequence[Itemset],
    broadcast: Optional[CandidateTrie],
    emission_mode: str,
    *,
    k: int,
    stop: StopRule,
    optimized: bool = False,
) -> MapOutput:
    """
    Mapper de Job2 para todas las variantes.

    La primera pasada genera C_k = apriori-gen(L_{k-1}); las siguientes
    generan el nivel k+1, k+2, ... desde los candidatos de la pasada
    anterior: apriori-gen sin optimizar, non-apriori-gen con optimized.
    candidateCount acumula |trieC| por nivel. Un nivel sin candidatos es
    la última pasada ejecutada de la fase.

    La generación ocurre una vez por map task; el resultado es idéntico a
    generar por transacción.
    """
    current = broadcast if broadcast is not None else CandidateTrie(k - 1)
    if current.level != k - 1:
        raise ValidationError(f"Se esperaba L_{k - 1} y llegó un trie de nivel {current.level}.")

    pairs: list[tuple[Itemset, int]] = []
    per_level: list[int] = []
    modes: list[str] = []
    gens: list[GenCounters] = []
    candidate_count = 0
    emitted = 0
    visits = 0

    while True:
        if per_level and optimized:
            candidates, gen = non_apriori_gen(current)
            modes.append(PassMode.UNPRUNED.value)
        else:
            candidates, gen = apriori_gen(current)
            modes.append(PassMode.PRUNED.value)

        per_level.append(len(candidates))
        gens.append(gen)
        candidate_count += len(candidates)

        e, v = _count_split(candidates, split, emission_mode, pairs)
        emitted += e
        visits += v

        if not len(candidates) or stop.done(len(per_level), candidate_count):
            break
        current = candidates

    context = MapContext(
        candidate_count=candidate_count,
        npass=len(per_level),
        per_level_candidates=tuple(per_level),
        modes=tuple(modes),
        per_level_gen=tuple(gens),
    )
    return MapOutput(pairs=pairs, context=context, emitted_pairs=emitted, subset_node_visits=visits)
