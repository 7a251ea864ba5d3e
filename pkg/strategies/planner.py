from __future__ import annotations

from dataclasses import dataclass


@dataclass
class PlannerState:
    """
    Estado del driver entre fases de Job2.
    """
    k: int = 2
    npass: int = 1
    num_cands_k: int = 0
    num_cands_k_prev: int = 0
    et: float = 0.0
    et_prev: float = 0.0
    alpha: float = 1.0

    def advance(self, executed: int):
        self.k += executed


def candidate_threshold(alpha: float, longest_level_count: int) -> float:
    """ct = alpha * |L| del nivel completo más alto."""
    return alpha * longest_level_count


def dpc_next_alpha(et_prev: float, beta: float, alpha_high: float) -> float:
    # "menor que" estricto
    return alpha_high if et_prev < beta else 1.0


def etdpc_next_alpha(et: float, et_prev: float, beta1: float, beta2: float) -> float:
    if et_prev < et:
        if et <= beta1:
            return 3.0
        if et < beta2:
            return 2.0
        return 1.0
    if et_prev >= 1.5 * et:
        return 3.0
    return 2.0


def vfpc_next_npass(num_cands_k: int, num_cands_k_prev: int, npass: int) -> int:
    if num_cands_k < num_cands_k_prev:
        return npass + 3
    return 2
