"""Tersinir devre modeli: çok kontrollü NOT (MCT) kapıları ve simülasyon."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from app.bitstring import BitString, check_width
from app.config import DEFAULT_MAX_CONTROLS, DEFAULT_NEGATIVE_CONTROLS, ENUM_MAX_LINES
from app.exceptions import CapacityExceededError, InvalidArgumentError
from app.rng import RngLanes, RngStream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Gate:
    """
    Hedef hattı, tüm kontroller polaritelerine uyduğunda çeviren MCT kapısı.
    controls: (hat, pozitif_mi) çiftleri, hatta göre sıralı tutulur.
    """

    target: int
    controls: tuple[tuple[int, bool], ...] = ()
    care_mask: int = field(init=False, repr=False, compare=False)
    value_mask: int = field(init=False, repr=False, compare=False)
    max_line: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        canonical = tuple(sorted((int(line), bool(positive)) for line, positive in self.controls))
        lines = [line for line, _ in canonical]
        if self.target < 0 or any(line < 0 for line in lines):
            raise InvalidArgumentError("hat indeksi negatif olamaz")
        if len(set(lines)) != len(lines):
            raise InvalidArgumentError(f"tekrarlanan kontrol hatti: {lines}")
        if self.target in lines:
            raise InvalidArgumentError(f"hedef {self.target} ayni zamanda kontrol")
        care = value = 0
        for line, positive in canonical:
            care |= 1 << line
            if positive:
                value |= 1 << line
        object.__setattr__(self, "controls", canonical)
        object.__setattr__(self, "care_mask", care)
        object.__setattr__(self, "value_mask", value)
        object.__setattr__(self, "max_line", max(lines + [self.target]))

    @classmethod
    def from_sorted(cls, target: int, controls: tuple[tuple[int, bool], ...]) -> Gate:
        """Zaten kanonik (sıralı, tekrarsız, hedefi içermeyen) kontrollerden, denetimsiz kurulum."""
        gate = object.__new__(cls)
        care = value = 0
        for line, positive in controls:
            care |= 1 << line
            if positive:
                value |= 1 << line
        object.__setattr__(gate, "target", target)
        object.__setattr__(gate, "controls", controls)
        object.__setattr__(gate, "care_mask", care)
        object.__setattr__(gate, "value_mask", value)
        object.__setattr__(gate, "max_line", max(target, controls[-1][0]) if controls else target)
        return gate

    @classmethod
    def mct(cls, controls: Iterable[int], target: int, negative: Iterable[int] = ()) -> Gate:
        negative = set(negative)
        return cls(target, tuple((line, line not in negative) for line in controls))

    @property
    def lines(self) -> tuple[int, ...]:
        return tuple(line for line, _ in self.controls) + (self.target,)

    @property
    def flip_mask(self) -> int:
        return 1 << self.target

    def fires(self, bits: int) -> bool:
        return (bits & self.care_mask) == self.value_mask


@dataclass(frozen=True)
class Circuit:
    """n hat üzerinde sıralı kapı listesi; {0,1}^n üzerinde bir permütasyon."""

    width: int
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self) -> None:
        check_width(self.width)
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        for index, gate in enumerate(gates):
            if gate.max_line >= self.width:
                raise InvalidArgumentError(
                    f"kapi {index} hat {gate.max_line} kullaniyor, genislik {self.width}"
                )

    @classmethod
    def identity(cls, width: int) -> Circuit:
        return cls(width, ())

    def __len__(self) -> int:
        return len(self.gates)

    @cached_property
    def program(self) -> tuple[tuple[int, int, int], ...]:
        """(care, value, flip) maskeleri; iç döngü için önceden derlenmiş."""
        return tuple((g.care_mask, g.value_mask, g.flip_mask) for g in self.gates)

    def run(self, bits: int) -> int:
        for care, value, flip in self.program:
            if bits & care == value:
                bits ^= flip
        return bits


def _check_same_width(a: Circuit, b: Circuit) -> None:
    if a.width != b.width:
        raise InvalidArgumentError(f"genislik uyusmazligi: {a.width} != {b.width}")


def apply_gate(gate: Gate, x: BitString) -> BitString:
    """Tek kapıyı uygular."""
    if gate.max_line >= x.width:
        raise InvalidArgumentError(f"hat {gate.max_line} genislik {x.width} disinda")
    bits = x.bits ^ gate.flip_mask if gate.fires(x.bits) else x.bits
    return BitString(x.width, bits)


def simulate(circuit: Circuit, x: BitString) -> BitString:
    """Kapıları soldan sağa uygular."""
    if x.width != circuit.width:
        raise InvalidArgumentError(f"genislik uyusmazligi: devre {circuit.width}, girdi {x.width}")
    return BitString(circuit.width, circuit.run(x.bits))


def simulate_many(circuit: Circuit, inputs: np.ndarray) -> np.ndarray:
    """Girdi dizisinin tamamını numpy ile vektörel simüle eder."""
    values = np.array(inputs, dtype=np.uint64, copy=True)
    for care, value, flip in circuit.program:
        hit = (values & np.uint64(care)) == np.uint64(value)
        values[hit] ^= np.uint64(flip)
    return values


def invert(circuit: Circuit) -> Circuit:
    """Her MCT kapısı kendi tersidir; kapı sırası ters çevrilir."""
    return Circuit(circuit.width, tuple(reversed(circuit.gates)))


def compose(first: Circuit, second: Circuit) -> Circuit:
    """second ∘ first: önce first, sonra second çalışır."""
    _check_same_width(first, second)
    return Circuit(first.width, first.gates + second.gates)


def check_enumerable(width: int) -> None:
    if width > ENUM_MAX_LINES:
        raise CapacityExceededError(f"{width} hat tam numaralandirma siniri {ENUM_MAX_LINES} ustunde")


def is_bijection(images: np.ndarray) -> bool:
    images = np.asarray(images)
    return bool(np.array_equal(np.sort(images), np.arange(images.size, dtype=images.dtype)))


@dataclass(frozen=True, eq=False)
class PermTable:
    """x. giriş = x'in görüntüsü; 2^n elemanlı permütasyon tablosu."""

    width: int
    images: np.ndarray

    def __post_init__(self) -> None:
        images = np.asarray(self.images, dtype=np.uint64)
        if images.size != 1 << self.width:
            raise InvalidArgumentError(f"tablo boyu {images.size}, beklenen {1 << self.width}")
        if not is_bijection(images):
            raise InvalidArgumentError("tablo bir permutasyon degil")
        images.setflags(write=False)
        object.__setattr__(self, "images", images)

    def __len__(self) -> int:
        return int(self.images.size)

    def __getitem__(self, x: int) -> int:
        return int(self.images[x])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PermTable):
            return NotImplemented
        return self.width == other.width and bool(np.array_equal(self.images, other.images))

    def tolist(self) -> list[int]:
        return [int(v) for v in self.images]

    def inverse(self) -> PermTable:
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(self.images.size, dtype=np.uint64)
        return PermTable(self.width, inv)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.images, np.arange(self.images.size, dtype=np.uint64)))


def permutation_table(circuit: Circuit) -> PermTable:
    """Tüm 2^n girdiyi simüle ederek permütasyon tablosu çıkarır (n ≤ 20)."""
    check_enumerable(circuit.width)
    inputs = np.arange(1 << circuit.width, dtype=np.uint64)
    return PermTable(circuit.width, simulate_many(circuit, inputs))


@dataclass(frozen=True)
class GatePolicy:
    """Rastgele kapı dağılımı: kontrol sayısı [min, max] düzgün, polarite seçimi."""

    min_controls: int = 0
    max_controls: int = DEFAULT_MAX_CONTROLS
    negative_controls: bool = DEFAULT_NEGATIVE_CONTROLS

    def __post_init__(self) -> None:
        if self.min_controls < 0 or self.max_controls < self.min_controls:
            raise InvalidArgumentError(
                f"gecersiz kontrol araligi: [{self.min_controls}, {self.max_controls}]"
            )

    @classmethod
    def default(cls, n: int) -> GatePolicy:
        return cls(0, min(DEFAULT_MAX_CONTROLS, n - 1), DEFAULT_NEGATIVE_CONTROLS)

    def window(self, k: int) -> GatePolicy:
        """Politikayı k hatlık pencereye daraltır."""
        upper = min(self.max_controls, k - 1)
        return GatePolicy(min(self.min_controls, upper), upper, self.negative_controls)

    def check(self, n: int) -> None:
        if self.max_controls > n - 1:
            raise InvalidArgumentError(
                f"politika {self.max_controls} kontrol istiyor, {n} hatta en fazla {n - 1}"
            )


def random_gate(lines: Sequence[int], stream: RngStream, policy: GatePolicy) -> Gate:
    """
    Verilen hatlar üzerinde rastgele MCT kapısı.
    Çekiliş sırası: kontrol sayısı, hedef, kontroller (kısmi Fisher-Yates), polarite kelimesi.
    """
    count = stream.between(policy.min_controls, policy.max_controls)
    target = lines[stream.below(len(lines))]
    pool = [line for line in lines if line != target]
    for i in range(count):
        j = i + stream.below(len(pool) - i)
        pool[i], pool[j] = pool[j], pool[i]
    chosen = pool[:count]
    if policy.negative_controls and count:
        word = stream.next_u64()
        controls = ((line, not (word >> i) & 1) for i, line in enumerate(chosen))
    else:
        controls = ((line, True) for line in chosen)
    return Gate.from_sorted(target, tuple(sorted(controls)))


def random_circuit(n: int, g: int, stream: RngStream, policy: GatePolicy | None = None) -> Circuit:
    """g rastgele MCT kapılı, n hatlı devre; akışa göre deterministik."""
    check_width(n)
    if g < 0:
        raise InvalidArgumentError(f"kapi sayisi negatif olamaz: {g}")
    policy = policy or GatePolicy.default(n)
    policy.check(n)
    lines = list(range(n))
    gates = tuple(random_gate(lines, stream, policy) for _ in range(g))
    logger.debug("Rastgele devre uretildi: n=%s g=%s", n, g)
    return Circuit(n, gates)


@dataclass(frozen=True, eq=False)
class ProgramBatch:
    """
    Aynı genişlikte L devrenin derlenmiş maskeleri, (kapı, şerit) düzeninde.
    Sütun j, j. devrenin `program` demetiyle aynı (care, value, flip) dizisidir.
    """

    width: int
    care: np.ndarray
    value: np.ndarray
    flip: np.ndarray

    @classmethod
    def empty(cls, width: int, lanes: int) -> ProgramBatch:
        blank = np.zeros((0, lanes), dtype=np.uint64)
        return cls(width, blank, blank, blank)

    @classmethod
    def of(cls, circuits: Sequence[Circuit]) -> ProgramBatch:
        """Aynı genişlik ve kapı sayısındaki devrelerden."""
        if not circuits:
            raise InvalidArgumentError("en az bir devre gerekli")
        width, length = circuits[0].width, len(circuits[0])
        if any(c.width != width or len(c) != length for c in circuits):
            raise InvalidArgumentError("devreler ayni genislik ve kapi sayisinda olmali")
        masks = np.array([c.program for c in circuits], dtype=np.uint64).reshape(len(circuits), length, 3)
        return cls(width, *(np.ascontiguousarray(masks[:, :, i].T) for i in range(3)))

    def __len__(self) -> int:
        return self.care.shape[0]

    @property
    def lanes(self) -> int:
        return self.care.shape[1]

    def program(self, lane: int) -> tuple[tuple[int, int, int], ...]:
        return tuple(
            zip(self.care[:, lane].tolist(), self.value[:, lane].tolist(), self.flip[:, lane].tolist())
        )


def random_programs(n: int, g: int, lanes: RngLanes, policy: GatePolicy | None = None) -> ProgramBatch:
    """
    random_circuit'in şeritlere yayılmış hali: sütun j, j. şeridin akışıyla
    random_circuit(n, g, ...) çağrısının programına eşittir ve akışı aynı kadar ilerletir.
    """
    check_width(n)
    if g < 0:
        raise InvalidArgumentError(f"kapi sayisi negatif olamaz: {g}")
    policy = policy or GatePolicy.default(n)
    policy.check(n)
    width = len(lanes)
    care = np.zeros((g, width), dtype=np.uint64)
    value = np.zeros((g, width), dtype=np.uint64)
    flip = np.zeros((g, width), dtype=np.uint64)
    base = np.arange(n - 1, dtype=np.int64)[:, None]
    columns = np.arange(width)
    one, zero = np.uint64(1), np.uint64(0)
    for s in range(g):
        count = lanes.between(policy.min_controls, policy.max_controls).astype(np.int64)
        target = lanes.below(n)
        pool = base + (base >= target.astype(np.int64))
        for i in range(policy.max_controls):
            active = count > i
            if not active.any():
                break
            j = np.where(active, i + lanes.below(n - 1 - i, active).astype(np.int64), i)
            picked = pool[j, columns]
            pool[j, columns] = pool[i]
            pool[i] = picked
            care[s] |= np.where(active, one << picked.astype(np.uint64), zero)
        value[s] = care[s]
        if policy.negative_controls:
            signed = count > 0
            if signed.any():
                word = lanes.next_u64(signed)
                for i in range(min(policy.max_controls, n - 1)):
                    negative = (count > i) & ((word >> np.uint64(i)) & one).astype(bool)
                    value[s] &= ~np.where(negative, one << pool[i].astype(np.uint64), zero)
        flip[s] = one << target
    logger.debug("Rastgele devre toplulugu uretildi: n=%s g=%s seritler=%s", n, g, width)
    return ProgramBatch(n, care, value, flip)
