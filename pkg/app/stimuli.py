"""
Rastgele uyarı (stimuli) ile denklik kontrolü ve kapalı form deneme sayısı hesapları.

Tek bir k boyutlu hata için her rastgele girdi, devreden bağımsız olarak
en az 2^-(k-1) olasılıkla hatayı açığa çıkarır; deneme sayısı geometriktir.
"""
import logging
import math
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from app.bitstring import BitString
from app.circuit import Circuit
from app.config import default_max_trials
from app.exceptions import InvalidArgumentError
from app.injection import SplicedBatch
from app.rng import RngLanes, RngStream
from app.schemas import TrialOutcomeDocument

logger = logging.getLogger(__name__)

# Tek seferlik kontrollerde uyarı akışı indeksi (kampanyadaki 3r+2 ile aynı rol)
CHECK_STREAM = 2
# Bir turda birlikte simüle edilen (deneme, şerit) çifti üst sınırı
ROUND_INPUTS = 1 << 14


class TrialOutcome(NamedTuple):
    status: Literal["detected", "exhausted"]
    trials_used: int
    max_trials: int
    witness: BitString | None

    @property
    def detected(self) -> bool:
        return self.status == "detected"

    def to_document(self) -> TrialOutcomeDocument:
        return TrialOutcomeDocument(
            status=self.status,
            trials_used=self.trials_used,
            max_trials=self.max_trials,
            witness=self.witness.to_binary() if self.witness is not None else None,
        )


@dataclass(frozen=True)
class ConfidenceSpec:
    k: int
    delta: float

    def __post_init__(self) -> None:
        if self.k < 1:
            raise InvalidArgumentError(f"k en az 1 olmali: {self.k}")
        if not 0 < self.delta < 1:
            raise InvalidArgumentError(f"delta (0,1) araliginda olmali: {self.delta}")


class FailureBounds(NamedTuple):
    exact_worst_case: float
    exp_bound: float


def check_equivalence(
    golden: Circuit,
    candidate: Circuit,
    stream: RngStream,
    max_trials: int | None = None,
) -> TrialOutcome:
    """
    Düzgün rastgele girdileri (iadeli) tek tek dener; ilk uyuşmazlıkta
    1 tabanlı deneme indeksiyle döner, aksi halde 'exhausted'.
    """
    if golden.width != candidate.width:
        raise InvalidArgumentError(f"genislik uyusmazligi: {golden.width} != {candidate.width}")
    n = golden.width
    if max_trials is None:
        max_trials = default_max_trials(n)
    if max_trials < 1:
        raise InvalidArgumentError(f"max_trials en az 1 olmali: {max_trials}")
    shift = 64 - n
    run_golden, run_candidate = golden.run, candidate.run
    for trial in range(1, max_trials + 1):
        x = stream.next_u64() >> shift
        if run_golden(x) != run_candidate(x):
            return TrialOutcome("detected", trial, max_trials, BitString(n, x))
    logger.debug("Uyusmazlik bulunamadi: %s deneme tuketildi", max_trials)
    return TrialOutcome("exhausted", max_trials, max_trials, None)


def check_equivalence_batch(
    pairs: SplicedBatch,
    lanes: RngLanes,
    max_trials: int | None = None,
) -> list[TrialOutcome]:
    """
    check_equivalence'ın şeritlere yayılmış hali: j. sonuç, j. şeridin
    (ideal, bozuk) çiftinin j. akışla tek tek kontrolüyle aynıdır.
    Denemeler turlar halinde, tur boyu ikiye katlanarak simüle edilir;
    tespit edilen şeritler tur sonunda ayıklanır.
    """
    if len(lanes) != pairs.lanes:
        raise InvalidArgumentError(f"{pairs.lanes} serit icin {len(lanes)} akis")
    n = pairs.width
    if max_trials is None:
        max_trials = default_max_trials(n)
    if max_trials < 1:
        raise InvalidArgumentError(f"max_trials en az 1 olmali: {max_trials}")
    shift = np.uint64(64 - n)
    trials = np.full(pairs.lanes, max_trials, dtype=np.int64)
    witness = np.zeros(pairs.lanes, dtype=np.uint64)
    found = np.zeros(pairs.lanes, dtype=bool)
    live = np.arange(pairs.lanes)
    pending = np.ones(pairs.lanes, dtype=bool)
    care, value, flips = pairs.care, pairs.value, pairs.flips[:, :, None, :]
    done, size = 0, 1
    while done < max_trials and live.size:
        size = min(size, max_trials - done)
        inputs = np.empty((size, live.size), dtype=np.uint64)
        for t in range(size):
            inputs[t] = lanes.next_u64() >> shift
        state = np.broadcast_to(inputs, (2, size, live.size)).copy()
        scratch = np.empty_like(state)
        hit = np.empty(state.shape, dtype=bool)
        for i in range(care.shape[0]):
            np.bitwise_and(state, care[i], out=scratch)
            np.equal(scratch, value[i], out=hit)
            np.multiply(flips[i], hit, out=scratch)
            np.bitwise_xor(state, scratch, out=state)
        differ = (state[0] != state[1]) & pending
        hits = np.flatnonzero(differ.any(axis=0))
        if hits.size:
            first = differ.argmax(axis=0)[hits]
            trials[live[hits]] = done + first + 1
            witness[live[hits]] = inputs[first, hits]
            found[live[hits]] = True
            pending[hits] = False
        done += size
        remaining = int(pending.sum())
        if remaining == 0:
            break
        if remaining <= live.size // 2:
            keep = np.flatnonzero(pending)
            live, pending = live[keep], pending[keep]
            care, value, flips = care[:, keep], value[:, keep], flips[..., keep]
            lanes = lanes.select(keep)
        size = max(1, min(2 * size, ROUND_INPUTS // live.size))
    logger.debug("Serit kontrolu: %s/%s serit %s denemede ayrildi", int(found.sum()), pairs.lanes, done)
    return [
        TrialOutcome("detected", int(trials[j]), max_trials, BitString(n, int(witness[j])))
        if found[j]
        else TrialOutcome("exhausted", max_trials, max_trials, None)
        for j in range(pairs.lanes)
    ]


def required_inputs(spec: ConfidenceSpec) -> int:
    """⌈ln(1/δ)·2^(k-1)⌉: δ güvenle k boyutlu hatayı yakalamaya yeten girdi sayısı."""
    return math.ceil(math.log(1 / spec.delta) * 2 ** (spec.k - 1))


def detection_probability_lower_bound(k: int) -> float:
    if k < 1:
        raise InvalidArgumentError(f"k en az 1 olmali: {k}")
    return 2.0 ** -(k - 1)


def _log_miss(p: float) -> float:
    """ln(1 - p); p küçükken 1 - p yuvarlanmasın diye log1p ile."""
    return math.log1p(-p)


def failure_probability_bounds(k: int, N: int) -> FailureBounds:
    """N denemeden sonra kaçırma olasılığı: kesin en kötü durum ve üstel sınır."""
    if k < 1 or N < 0:
        raise InvalidArgumentError(f"gecersiz parametre: k={k} N={N}")
    p = detection_probability_lower_bound(k)
    if p == 1:
        exact = 0.0 if N >= 1 else 1.0
    else:
        exact = math.exp(N * _log_miss(p))
    return FailureBounds(exact, math.exp(-N * p))


def best_case_expected_trials(k: int, l: int) -> float:
    """Ayrık pencerelerde l bağımsız en kötü durum hatası için beklenen deneme sayısı."""
    if k < 1 or l < 1:
        raise InvalidArgumentError(f"gecersiz parametre: k={k} l={l}")
    if k == 1:
        return 1.0
    if l == 1:
        return float(2 ** (k - 1))
    return -1 / math.expm1(l * _log_miss(detection_probability_lower_bound(k)))


def approx_best_case_trials(k: int, l: int) -> float:
    """l, 2^(k-1)'e göre küçükken 2^(k-1)/l yaklaşımı."""
    if k < 1 or l < 1:
        raise InvalidArgumentError(f"gecersiz parametre: k={k} l={l}")
    return 2 ** (k - 1) / l


def worst_case_expected_trials(n: int) -> float:
    """Maskeleyen iki bit-çevirme kurgusunda (tespit olasılığı 4/2^n) beklenen deneme: 2^(n-2)."""
    if n < 2:
        raise InvalidArgumentError(f"n en az 2 olmali: {n}")
    return float(2 ** (n - 2))


def geometric_cdf(p: float, x: int) -> float:
    """Pr[T ≤ x], T ~ Geometrik(p), 1 tabanlı."""
    if x < 1:
        return 0.0
    if p >= 1:
        return 1.0
    return -math.expm1(x * _log_miss(p))
