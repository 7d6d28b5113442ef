"""
Hata inşası ve enjeksiyonu.

Bozuk devre R̃ = R_l ∘ E_l ∘ … ∘ E_1 ∘ R_0: ideal kapı listesi, kayıtlı
kapı aralıklarına (0..g) eklenen hata devreleriyle bölünür. InjectionRecord
hem R'yi hem R̃'yi birebir yeniden kurmaya yeter.
"""
import hashlib
import logging
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from app.circuit import Circuit, Gate, GatePolicy, ProgramBatch, random_gate, simulate_many
from app.config import ERROR_LENGTH_FACTOR, ERROR_MAX_ATTEMPTS, SUPPORT_MAX_LINES
from app.exceptions import CapacityExceededError, InvalidArgumentError, SamplingFailureError
from app.realfmt import write_real
from app.rng import RngStream
from app.schemas import (
    CircuitDocument,
    ControlDocument,
    GateDocument,
    InjectionRecordDocument,
    SourceDocument,
    WindowDocument,
)

logger = logging.getLogger(__name__)

ErrorKind = Literal["worst_case", "random"]


@dataclass(frozen=True)
class ErrorSpec:
    """k hatlık bitişik pencere [window_start, window_start + k) üzerinde tek hata."""

    k: int
    window_start: int
    kind: ErrorKind = "worst_case"
    sequence_length: int | None = None
    max_attempts: int | None = None

    @property
    def window(self) -> tuple[int, int]:
        return self.window_start, self.k

    def check(self, n: int) -> None:
        if self.kind not in ("worst_case", "random"):
            raise InvalidArgumentError(f"bilinmeyen hata turu: {self.kind}")
        if not 1 <= self.k <= n:
            raise InvalidArgumentError(f"hata boyu 1..{n} araliginda olmali: {self.k}")
        if self.window_start < 0 or self.window_start + self.k > n:
            raise InvalidArgumentError(
                f"pencere [{self.window_start}, {self.window_start + self.k}) {n} hatta sigmiyor"
            )


@dataclass(frozen=True)
class SourceIdentity:
    width: int
    gate_count: int
    digest: str

    @classmethod
    def of(cls, circuit: Circuit) -> "SourceIdentity":
        return cls(circuit.width, len(circuit), circuit_digest(circuit))


@dataclass(frozen=True)
class InjectionRecord:
    positions: tuple[int, ...]
    errors: tuple[Circuit, ...]
    windows: tuple[tuple[int, int], ...]
    source: SourceIdentity

    def __post_init__(self) -> None:
        if not len(self.positions) == len(self.errors) == len(self.windows):
            raise InvalidArgumentError("kayit listeleri ayni uzunlukta olmali")
        if any(a > b for a, b in zip(self.positions, self.positions[1:])):
            raise InvalidArgumentError("pozisyonlar azalmayan sirada olmali")


def circuit_digest(circuit: Circuit) -> str:
    """Kanonik `.real` metninin SHA-256 özeti."""
    return hashlib.sha256(write_real(circuit).encode("utf-8")).hexdigest()


def _check_window(n: int, k: int, window_start: int) -> None:
    ErrorSpec(k, window_start).check(n)


def worst_case_error(n: int, k: int, window_start: int) -> Circuit:
    """(k-1) kontrollü NOT: kontroller pencerenin alt k-1 hattında, hedef en üst hat."""
    _check_window(n, k, window_start)
    top = window_start + k - 1
    return Circuit(n, (Gate.mct(range(window_start, top), top),))


def _window_lines(error: Circuit, window: tuple[int, int]) -> tuple[int, int]:
    start, k = window
    if k > SUPPORT_MAX_LINES:
        raise CapacityExceededError(f"destek analizi en fazla {SUPPORT_MAX_LINES} hat: k={k}")
    _check_window(error.width, k, start)
    for gate in error.gates:
        if any(not start <= line < start + k for line in gate.lines):
            raise InvalidArgumentError(f"hata kapisi pencere disinda: {gate.lines}")
    return start, k


def support(error: Circuit, window: tuple[int, int]) -> set[int]:
    """
    Hatanın önemsiz olmayan şekilde etkilediği en küçük hat kümesi.
    Hat ℓ desteğin dışındadır ancak ve ancak her pencere deseni x için
    E(x) ℓ'de x ile aynıysa ve E(x ^ e_ℓ) = E(x) ^ e_ℓ ise.
    """
    start, k = _window_lines(error, window)
    index = np.arange(1 << k, dtype=np.uint64)
    patterns = index << np.uint64(start)
    images = simulate_many(error, patterns)
    lines = set()
    for offset in range(k):
        bit = np.uint64(1 << (start + offset))
        unchanged = np.all((images ^ patterns) & bit == 0)
        flipped = images[index ^ np.uint64(1 << offset)]
        commutes = np.array_equal(flipped, images ^ bit)
        if not (unchanged and commutes):
            lines.add(start + offset)
    return lines


@dataclass(frozen=True)
class RandomErrorPolicy:
    """Rastgele hata örneklemesi: dizi uzunluğu (None = 3k) ve deneme bütçesi."""

    sequence_length: int | None = None
    max_attempts: int = ERROR_MAX_ATTEMPTS
    gate_policy: GatePolicy | None = None

    def length_for(self, k: int) -> int:
        return self.sequence_length if self.sequence_length is not None else ERROR_LENGTH_FACTOR * k


def random_error(
    n: int,
    k: int,
    window_start: int,
    stream: RngStream,
    policy: RandomErrorPolicy | None = None,
) -> Circuit:
    """
    Pencereye hapsedilmiş rastgele kapı dizisi; en küçük desteği tam olarak
    k pencere hattı olana kadar ret örneklemesiyle aranır.
    """
    _check_window(n, k, window_start)
    policy = policy or RandomErrorPolicy()
    gate_policy = (policy.gate_policy or GatePolicy()).window(k)
    length = policy.length_for(k)
    if length < 1 or policy.max_attempts < 1:
        raise InvalidArgumentError(f"gecersiz politika: uzunluk={length} deneme={policy.max_attempts}")
    lines = list(range(window_start, window_start + k))
    window = (window_start, k)
    for attempt in range(1, policy.max_attempts + 1):
        candidate = Circuit(n, tuple(random_gate(lines, stream, gate_policy) for _ in range(length)))
        if len(support(candidate, window)) == k:
            if attempt > 1:
                logger.debug("Rastgele hata %s denemede bulundu (k=%s)", attempt, k)
            return candidate
    raise SamplingFailureError(
        f"{policy.max_attempts} denemede k={k} destekli hata bulunamadi (pencere {window})",
        attempts=policy.max_attempts,
        window=window,
    )


def build_error(n: int, spec: ErrorSpec, stream: RngStream) -> Circuit:
    spec.check(n)
    if spec.kind == "worst_case":
        return worst_case_error(n, spec.k, spec.window_start)
    policy = RandomErrorPolicy(
        sequence_length=spec.sequence_length,
        max_attempts=spec.max_attempts if spec.max_attempts is not None else ERROR_MAX_ATTEMPTS,
    )
    return random_error(n, spec.k, spec.window_start, stream, policy)


def splice(ideal: Circuit, positions: Sequence[int], errors: Sequence[Circuit]) -> Circuit:
    """Hata kapı dizilerini verilen aralıklara ekler; pozisyonlar azalmayan sırada olmalı."""
    gates: list[Gate] = []
    cursor = 0
    for position, error in zip(positions, errors):
        if error.width != ideal.width:
            raise InvalidArgumentError(f"hata genisligi {error.width} != {ideal.width}")
        gates.extend(ideal.gates[cursor:position])
        gates.extend(error.gates)
        cursor = position
    gates.extend(ideal.gates[cursor:])
    return Circuit(ideal.width, tuple(gates))


def place_errors(
    circuit: Circuit,
    specs: Sequence[tuple[int, ErrorSpec]],
    stream: RngStream,
) -> tuple[tuple[int, ...], tuple[Circuit, ...], tuple[tuple[int, int], ...]]:
    """Spesifikasyonları pozisyona göre (kararlı) sıralar ve hata devrelerini üretir."""
    return build_errors(circuit.width, len(circuit), specs, stream)


def build_errors(
    n: int,
    g: int,
    specs: Sequence[tuple[int, ErrorSpec]],
    stream: RngStream,
) -> tuple[tuple[int, ...], tuple[Circuit, ...], tuple[tuple[int, int], ...]]:
    """place_errors'ın yalnızca genişlik ve kapı sayısına bakan çekirdeği."""
    for position, spec in specs:
        if not 0 <= position <= g:
            raise InvalidArgumentError(f"pozisyon 0..{g} araliginda olmali: {position}")
        spec.check(n)
    ordered = sorted(specs, key=lambda item: item[0])
    positions = tuple(position for position, _ in ordered)
    errors = tuple(build_error(n, spec, stream) for _, spec in ordered)
    windows = tuple(spec.window for _, spec in ordered)
    return positions, errors, windows


@dataclass(frozen=True, eq=False)
class SplicedBatch:
    """
    Şerit başına (ideal, bozuk) devre çifti, ortak hizalı kapı ızgarasında.
    flips[:, 0] ideal, flips[:, 1] bozuk taraftır; hata yuvalarında ideal
    taraf hiçbir şey çevirmez, sondaki dolgu kapıları iki tarafta da etkisizdir.
    """

    width: int
    care: np.ndarray
    value: np.ndarray
    flips: np.ndarray

    def __len__(self) -> int:
        return self.care.shape[0]

    @property
    def lanes(self) -> int:
        return self.care.shape[1]


def splice_batch(
    base: ProgramBatch,
    positions: Sequence[Sequence[int]],
    errors: Sequence[Sequence[Circuit]],
) -> SplicedBatch:
    """Her şeritte splice(devre_j, positions[j], errors[j]) ile ideal devre_j'yi hizalar."""
    g, lane_count = base.care.shape
    if len(positions) != lane_count or len(errors) != lane_count:
        raise InvalidArgumentError(f"{lane_count} serit icin {len(positions)} pozisyon listesi")
    inserted = np.zeros((g + 1, lane_count), dtype=np.int64)
    extra = np.zeros(lane_count, dtype=np.int64)
    slots, columns, masks = [], [], []
    for lane, (lane_positions, lane_errors) in enumerate(zip(positions, errors)):
        offset = 0
        previous = 0
        for position, error in zip(lane_positions, lane_errors):
            if error.width != base.width:
                raise InvalidArgumentError(f"hata genisligi {error.width} != {base.width}")
            if not previous <= position <= g:
                raise InvalidArgumentError(f"pozisyonlar azalmayan ve 0..{g} icinde olmali: {position}")
            for q, mask in enumerate(error.program):
                slots.append(position + offset + q)
                columns.append(lane)
                masks.append(mask)
            offset += len(error)
            inserted[position, lane] += len(error)
            previous = position
        extra[lane] = offset
    total = g + int(extra.max(initial=0))
    care = np.zeros((total, lane_count), dtype=np.uint64)
    value = np.zeros((total, lane_count), dtype=np.uint64)
    flips = np.zeros((total, 2, lane_count), dtype=np.uint64)
    shifted = np.arange(g, dtype=np.int64)[:, None] + np.cumsum(inserted[:g], axis=0)
    np.put_along_axis(care, shifted, base.care, axis=0)
    np.put_along_axis(value, shifted, base.value, axis=0)
    for side in (0, 1):
        np.put_along_axis(flips[:, side], shifted, base.flip, axis=0)
    if masks:
        rows = np.array(slots, dtype=np.int64)
        lanes = np.array(columns, dtype=np.int64)
        packed = np.array(masks, dtype=np.uint64)
        care[rows, lanes] = packed[:, 0]
        value[rows, lanes] = packed[:, 1]
        flips[rows, 1, lanes] = packed[:, 2]
    return SplicedBatch(base.width, care, value, flips)


def inject(
    circuit: Circuit,
    specs: Sequence[tuple[int, ErrorSpec]],
    stream: RngStream,
) -> tuple[Circuit, InjectionRecord]:
    """R̃ ve onu yeniden kurmaya yeten kaydı döndürür."""
    positions, errors, windows = place_errors(circuit, specs, stream)
    corrupted = splice(circuit, positions, errors)
    record = InjectionRecord(positions, errors, windows, SourceIdentity.of(circuit))
    logger.info("%s hata enjekte edildi (n=%s, g=%s)", len(errors), circuit.width, len(circuit))
    return corrupted, record


def random_injection_plan(
    g: int,
    n: int,
    l: int,
    k: int,
    stream: RngStream,
    kind: ErrorKind = "worst_case",
    sequence_length: int | None = None,
    max_attempts: int | None = None,
) -> list[tuple[int, ErrorSpec]]:
    """l bağımsız (pozisyon ∈ 0..g, pencere başı ∈ 0..n-k) çekilişi."""
    if l < 1:
        raise InvalidArgumentError(f"hata sayisi en az 1 olmali: {l}")
    if g < 0:
        raise InvalidArgumentError(f"kapi sayisi negatif olamaz: {g}")
    _check_window(n, k, 0)
    plan = []
    for _ in range(l):
        position = stream.below(g + 1)
        window_start = stream.below(n - k + 1)
        plan.append((position, ErrorSpec(k, window_start, kind, sequence_length, max_attempts)))
    return plan


def replay(ideal: Circuit, record: InjectionRecord) -> Circuit:
    """Kayıttaki hataları rastgelelik olmadan yeniden ekler."""
    if SourceIdentity.of(ideal) != record.source:
        raise InvalidArgumentError("kayit bu devreye ait degil (ozet uyusmuyor)")
    return splice(ideal, record.positions, record.errors)


def strip_errors(corrupted: Circuit, record: InjectionRecord) -> Circuit:
    """Eklenen hata kapılarını çıkarıp ideal kapı listesini geri verir."""
    gates = list(corrupted.gates)
    starts = []
    offset = 0
    for position, error in zip(record.positions, record.errors):
        starts.append(position + offset)
        offset += len(error)
    for start, error in reversed(list(zip(starts, record.errors))):
        if tuple(gates[start:start + len(error)]) != error.gates:
            raise InvalidArgumentError(f"kayitli hata kapilari {start}. konumda bulunamadi")
        del gates[start:start + len(error)]
    return Circuit(corrupted.width, tuple(gates))


def error_span(ideal: Circuit, record: InjectionRecord) -> tuple[Circuit, Circuit]:
    """
    İlk hatadan önceki (R_0) ve son hatadan sonraki (R_l) kısımları atar.
    Kesin tespit olasılığı değişmez.
    """
    if not record.positions:
        empty = Circuit.identity(ideal.width)
        return empty, empty
    first, last = record.positions[0], record.positions[-1]
    golden = Circuit(ideal.width, ideal.gates[first:last])
    shifted = [position - first for position in record.positions]
    return golden, splice(golden, shifted, record.errors)


def _circuit_to_document(circuit: Circuit) -> CircuitDocument:
    return CircuitDocument(
        width=circuit.width,
        gates=[
            GateDocument(
                target=gate.target,
                controls=[ControlDocument(line=line, positive=positive) for line, positive in gate.controls],
            )
            for gate in circuit.gates
        ],
    )


def _circuit_from_document(doc: CircuitDocument) -> Circuit:
    return Circuit(
        doc.width,
        tuple(Gate(g.target, tuple((c.line, c.positive) for c in g.controls)) for g in doc.gates),
    )


def record_to_document(record: InjectionRecord) -> InjectionRecordDocument:
    return InjectionRecordDocument(
        source=SourceDocument(
            width=record.source.width,
            gate_count=record.source.gate_count,
            digest=record.source.digest,
        ),
        positions=list(record.positions),
        windows=[WindowDocument(start=start, k=k) for start, k in record.windows],
        errors=[_circuit_to_document(error) for error in record.errors],
    )


def record_from_document(doc: InjectionRecordDocument) -> InjectionRecord:
    return InjectionRecord(
        positions=tuple(doc.positions),
        errors=tuple(_circuit_from_document(error) for error in doc.errors),
        windows=tuple((w.start, w.k) for w in doc.windows),
        source=SourceIdentity(doc.source.width, doc.source.gate_count, doc.source.digest),
    )
