"""
Küçük n için tam numaralandırmaya dayalı kesin referanslar.

Olasılıklar tamsayı çiftleri olarak taşınır; eşitlik karşılaştırmaları
tolerans gerektirmez.
"""
import logging
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from app.circuit import (
    Circuit,
    Gate,
    PermTable,
    check_enumerable,
    compose,
    permutation_table,
    simulate_many,
)
from app.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

# Şekildeki 8 girişli AND ağacı: katman 0 = girişler, 3 = çıkış
AND_CASCADE_LAYERS = (8, 4, 2, 1)
# Yalnızca 4/256 girdinin yakaladığı konum: ilk AND katmanının bir çıkışı
MASKING_FLIP_WIRE = (1, 0)


class ExactProbability(NamedTuple):
    numerator: int
    denominator: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def value(self) -> float:
        return self.numerator / self.denominator

    def __str__(self) -> str:
        return f"{self.numerator} / {self.denominator}"


class WorstCaseComposition(NamedTuple):
    ideal: Circuit
    corrupted: Circuit
    effective_error: Circuit
    effective_window: tuple[int, int]


def exact_detection_probability(golden: Circuit, candidate: Circuit) -> ExactProbability:
    """Pr[golden(x) ≠ candidate(x)], tüm 2^n girdi numaralandırılarak."""
    if golden.width != candidate.width:
        raise InvalidArgumentError(f"genislik uyusmazligi: {golden.width} != {candidate.width}")
    check_enumerable(golden.width)
    inputs = np.arange(1 << golden.width, dtype=np.uint64)
    mismatches = np.count_nonzero(simulate_many(golden, inputs) != simulate_many(candidate, inputs))
    return ExactProbability(int(mismatches), 1 << golden.width)


def count_fixed_points(table: PermTable) -> int:
    return int(np.count_nonzero(table.images == np.arange(len(table), dtype=np.uint64)))


def max_fixed_points(n: int) -> int:
    """Birim olmayan bir permütasyonun en fazla 2^n - 2 sabit noktası olabilir."""
    return (1 << n) - 2


def commutes(a: Circuit, b: Circuit) -> bool:
    """a ∘ b = b ∘ a mı (tam numaralandırma)."""
    return permutation_table(compose(a, b)) == permutation_table(compose(b, a))


def worst_case_composition(n: int) -> WorstCaseComposition:
    """
    R2 = (n-1) kontrollü NOT (kontroller 0..n-2, hedef n-1); E1 = E2 = hat 0'da NOT.
    E2 ∘ R2 ∘ E1 = Ẽ ∘ R2, Ẽ hat 0 dışındaki n-1 hatta (n-2) kontrollü NOT.
    """
    if n < 2:
        raise InvalidArgumentError(f"n en az 2 olmali: {n}")
    target = n - 1
    ideal_gate = Gate.mct(range(target), target)
    flip = Gate(0)
    ideal = Circuit(n, (ideal_gate,))
    corrupted = Circuit(n, (flip, ideal_gate, flip))
    effective_error = Circuit(n, (Gate.mct(range(1, target), target),))
    return WorstCaseComposition(ideal, corrupted, effective_error, (1, n - 1))


def _check_wire(flip_wire: tuple[int, int] | None) -> None:
    if flip_wire is None:
        return
    layer, index = flip_wire
    if not 0 <= layer < len(AND_CASCADE_LAYERS) or not 0 <= index < AND_CASCADE_LAYERS[layer]:
        raise InvalidArgumentError(f"gecersiz tel: katman {layer}, indeks {index}")


def _and_cascade(inputs: np.ndarray, flip_wire: tuple[int, int] | None) -> np.ndarray:
    wires = [((inputs >> i) & 1).astype(bool) for i in range(AND_CASCADE_LAYERS[0])]
    layer = 0
    while True:
        if flip_wire is not None and flip_wire[0] == layer:
            wires[flip_wire[1]] = ~wires[flip_wire[1]]
        if len(wires) == 1:
            return wires[0]
        wires = [wires[i] & wires[i + 1] for i in range(0, len(wires), 2)]
        layer += 1


def and_cascade_demo(flip_wire: tuple[int, int] | None = MASKING_FLIP_WIRE) -> tuple[int, int]:
    """
    Tersinir olmayan y = x8·…·x1 AND ağacında tek tel olumsuzlandığında
    hatayı yakalayan girdi sayısı / 256.
    """
    _check_wire(flip_wire)
    inputs = np.arange(1 << AND_CASCADE_LAYERS[0], dtype=np.uint64)
    ideal = _and_cascade(inputs, None)
    faulty = _and_cascade(inputs, flip_wire)
    return int(np.count_nonzero(ideal != faulty)), int(inputs.size)
