"""
Tohumlu Monte-Carlo deney koşucusu.

Her tekrar r için akışlar (master_seed, 3r) devre üretimi, (3r+1) hata
örneklemesi ve (3r+2) uyarılar içindir; hata modelini değiştirmek uyarı
dizisini etkilemez. Devre her n için bir kez üretilir ve ızgaradaki tüm
(k, l) noktalarında kullanılır.
"""
import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Literal, NamedTuple

import numpy as np
from scipy import stats

from app import __version__
from app.circuit import Circuit, GatePolicy, ProgramBatch, random_circuit, random_programs
from app.config import (
    CAMPAIGN_BATCH,
    CAMPAIGN_WORKERS,
    DEFAULT_MAX_CONTROLS,
    default_gate_count,
    default_max_trials,
)
from app.exceptions import InvalidArgumentError, ResultsIOError, SamplingFailureError
from app.injection import build_errors, random_injection_plan, splice, splice_batch
from app.rng import RngLanes, derive_stream
from app.schemas import CampaignConfig, ResultRow, ResultsDocument, SummaryDocument, SummaryRow
from app.stimuli import best_case_expected_trials, check_equivalence, check_equivalence_batch, geometric_cdf

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("experiment", "n", "g", "k", "l", "error_kind", "repetition", "trials_used", "detected")
SUMMARY_COLUMNS = (
    "n", "k", "l", "error_kind", "samples", "detected", "undetected", "mean", "median", "best_case",
)


class Row(NamedTuple):
    experiment: str
    n: int
    g: int
    k: int
    l: int
    error_kind: str
    repetition: int
    trials_used: int
    detected: bool


@dataclass(frozen=True)
class ResultsTable:
    rows: tuple[Row, ...]
    config: CampaignConfig | None = None
    code_version: str = __version__
    # n -> kullanilan max_trials
    max_trials: tuple[tuple[int, int], ...] = ()

    def to_document(self) -> ResultsDocument:
        return ResultsDocument(
            code_version=self.code_version,
            config=self.config,
            max_trials=dict(self.max_trials),
            rows=[ResultRow(**row._asdict()) for row in self.rows],
        )

    def trials(self, n: int, k: int, l: int, error_kind: str | None = None) -> np.ndarray:
        """Bir grubun tespit edilmiş deneme sayıları."""
        return np.array(
            [
                row.trials_used
                for row in self.rows
                if (row.n, row.k, row.l) == (n, k, l)
                and row.detected
                and (error_kind is None or row.error_kind == error_kind)
            ],
            dtype=np.int64,
        )


@dataclass(frozen=True)
class SummaryStats:
    groups: tuple[SummaryRow, ...]
    code_version: str = __version__

    def group(self, n: int, k: int, l: int, error_kind: str = "worst_case") -> SummaryRow:
        for row in self.groups:
            if (row.n, row.k, row.l, row.error_kind) == (n, k, l, error_kind):
                return row
        raise KeyError((n, k, l, error_kind))

    def to_document(self) -> SummaryDocument:
        return SummaryDocument(code_version=self.code_version, groups=list(self.groups))


def _gate_policy(config: CampaignConfig, n: int) -> GatePolicy:
    upper = DEFAULT_MAX_CONTROLS if config.max_controls is None else config.max_controls
    return GatePolicy(0, min(upper, n - 1), config.negative_controls)


def _sample_errors(
    config: CampaignConfig, n: int, g: int, k: int, l: int, r: int
) -> tuple[tuple[int, ...], tuple[Circuit, ...]]:
    """Tekrar r'nin (k, l) noktası için hata planı; her nokta 3r+1 akışını baştan türetir."""
    error_stream = derive_stream(config.master_seed, 3 * r + 1)
    try:
        plan = random_injection_plan(
            g, n, l, k, error_stream,
            kind=config.error_kind,
            sequence_length=config.error_sequence_length,
            max_attempts=config.error_max_attempts,
        )
        positions, errors, _ = build_errors(n, g, plan, error_stream)
    except SamplingFailureError as e:
        raise SamplingFailureError(
            f"kampanya n={n} k={k} l={l} tekrar={r}: {e}", e.attempts, e.window
        ) from e
    return positions, errors


def _run_repetition(config: CampaignConfig, n: int, g: int, max_trials: int, r: int) -> list[Row]:
    """Tek tekrar: devre bir kez üretilir, her (k, l) noktası aynı türetilmiş akışlarla koşar."""
    seed = config.master_seed
    circuit = random_circuit(n, g, derive_stream(seed, 3 * r), _gate_policy(config, n))
    identity = Circuit.identity(n)
    rows = []
    for k in config.k_values:
        for l in config.l_values:
            positions, errors = _sample_errors(config, n, g, k, l, r)
            if config.isolate_error:
                golden = identity
                candidate = splice(identity, [0] * len(errors), errors)
            else:
                golden = circuit
                candidate = splice(circuit, positions, errors)
            outcome = check_equivalence(golden, candidate, derive_stream(seed, 3 * r + 2), max_trials)
            rows.append(
                Row(config.experiment, n, g, k, l, config.error_kind, r, outcome.trials_used, outcome.detected)
            )
    logger.debug("Tekrar %s tamamlandi (n=%s)", r, n)
    return rows


def _run_batch(config: CampaignConfig, n: int, g: int, max_trials: int, reps: range) -> list[list[Row]]:
    """
    Ardışık tekrarları numpy şeritleriyle birlikte koşar; her tekrarın satırları
    _run_repetition ile aynıdır.
    """
    seed = config.master_seed
    if config.isolate_error:
        base = ProgramBatch.empty(n, len(reps))
    else:
        base = random_programs(n, g, RngLanes.derive(seed, [3 * r for r in reps]), _gate_policy(config, n))
    rows: list[list[Row]] = [[] for _ in reps]
    for k in config.k_values:
        for l in config.l_values:
            sampled = [_sample_errors(config, n, g, k, l, r) for r in reps]
            errors = [lane_errors for _, lane_errors in sampled]
            if config.isolate_error:
                positions = [[0] * len(lane_errors) for lane_errors in errors]
            else:
                positions = [lane_positions for lane_positions, _ in sampled]
            pairs = splice_batch(base, positions, errors)
            stimuli = RngLanes.derive(seed, [3 * r + 2 for r in reps])
            outcomes = check_equivalence_batch(pairs, stimuli, max_trials)
            for lane, (r, outcome) in enumerate(zip(reps, outcomes)):
                rows[lane].append(
                    Row(config.experiment, n, g, k, l, config.error_kind, r, outcome.trials_used, outcome.detected)
                )
    logger.debug("Tekrarlar %s..%s tamamlandi (n=%s)", reps.start, reps.stop - 1, n)
    return rows


def _batch_task(args: tuple[CampaignConfig, int, int, int, range]) -> tuple[int, list[list[Row]]]:
    config, n, g, max_trials, reps = args
    if len(reps) == 1:
        return reps.start, [_run_repetition(config, n, g, max_trials, reps.start)]
    return reps.start, _run_batch(config, n, g, max_trials, reps)


def run_campaign(config: CampaignConfig, workers: int | None = None, batch: int | None = None) -> ResultsTable:
    """
    Yapılandırmadaki tüm ızgara için tekrar başına bir satır üretir.
    Çıktı seri ve paralel koşuda, her yığın boyunda aynıdır (n, k, l, tekrar sırasında).
    """
    workers = CAMPAIGN_WORKERS if workers is None else workers
    batch = CAMPAIGN_BATCH if batch is None else batch
    if workers < 1:
        raise InvalidArgumentError(f"isci sayisi en az 1 olmali: {workers}")
    if batch < 1:
        raise InvalidArgumentError(f"yigin boyu en az 1 olmali: {batch}")
    # her isciye en az bir yigin dussun
    batch = min(batch, -(-config.repetitions // workers))
    rows: list[Row] = []
    effective: list[tuple[int, int]] = []
    for n in config.n_values:
        g = config.gate_count if config.gate_count is not None else default_gate_count(n)
        max_trials = config.max_trials if config.max_trials is not None else default_max_trials(n)
        effective.append((n, max_trials))
        logger.info(
            "Kampanya %s: n=%s g=%s max_trials=%s, %s tekrar",
            config.experiment, n, g, max_trials, config.repetitions,
        )
        tasks = [
            (config, n, g, max_trials, range(start, min(start + batch, config.repetitions)))
            for start in range(0, config.repetitions, batch)
        ]
        if workers == 1:
            batches = list(map(_batch_task, tasks))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                batches = list(pool.map(_batch_task, tasks))
        results = {start + offset: reps_rows for start, chunk in batches for offset, reps_rows in enumerate(chunk)}
        per_point: dict[tuple[int, int], list[Row]] = {}
        for r in range(config.repetitions):
            for row in results[r]:
                per_point.setdefault((row.k, row.l), []).append(row)
        for k in config.k_values:
            for l in config.l_values:
                point = per_point[(k, l)]
                undetected = sum(not row.detected for row in point)
                logger.info("n=%s k=%s l=%s: %s tekrar tamamlandi", n, k, l, len(point))
                if undetected:
                    logger.warning("n=%s k=%s l=%s: %s tekrar tespit edilemedi", n, k, l, undetected)
                rows.extend(point)
    return ResultsTable(tuple(rows), config, max_trials=tuple(effective))


def summarize(table: ResultsTable) -> SummaryStats:
    """
    (n, k, l, tür) gruplarında ortalama, medyan ve ampirik cdf.
    Tespit edilemeyen satırlar ortalamaya girmez ama cdf paydasında sayılır.
    """
    if not table.rows:
        raise InvalidArgumentError("bos tablo ozetlenemez")
    grouped: dict[tuple[int, int, int, str], list[Row]] = {}
    for row in table.rows:
        grouped.setdefault((row.n, row.k, row.l, row.error_kind), []).append(row)
    groups = []
    for (n, k, l, kind) in sorted(grouped):
        rows = grouped[(n, k, l, kind)]
        trials = np.array([row.trials_used for row in rows if row.detected], dtype=np.int64)
        samples = len(rows)
        best_case = best_case_expected_trials(k, l)
        xs, counts = np.unique(trials, return_counts=True)
        cdf = [(int(x), float(c) / samples) for x, c in zip(xs, np.cumsum(counts))]
        groups.append(
            SummaryRow(
                n=n,
                k=k,
                l=l,
                error_kind=kind,
                samples=samples,
                detected=int(trials.size),
                undetected=samples - int(trials.size),
                mean=float(np.mean(trials)) if trials.size else None,
                median=float(np.median(trials)) if trials.size else None,
                best_case=best_case,
                cdf=cdf,
                best_case_cdf=[geometric_cdf(1 / best_case, x) for x, _ in cdf],
            )
        )
    return SummaryStats(tuple(groups), table.code_version)


def compare_samples(a: Iterable[int], b: Iterable[int]) -> tuple[float, float]:
    """İki örneklem Kolmogorov-Smirnov testi: (istatistik, p-değeri)."""
    result = stats.ks_2samp(np.asarray(list(a)), np.asarray(list(b)))
    return float(result.statistic), float(result.pvalue)


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    return str(value)


def render(obj: ResultsTable | SummaryStats, fmt: Literal["csv", "json"]) -> str:
    if fmt == "json":
        return obj.to_document().model_dump_json(indent=2) + "\n"
    if fmt != "csv":
        raise InvalidArgumentError(f"bilinmeyen bicim: {fmt}")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if isinstance(obj, ResultsTable):
        writer.writerow(CSV_COLUMNS)
        for row in obj.rows:
            writer.writerow([_format_cell(value) for value in row])
    else:
        writer.writerow(SUMMARY_COLUMNS)
        for group in obj.groups:
            writer.writerow([_format_cell(getattr(group, column)) for column in SUMMARY_COLUMNS])
    return buffer.getvalue()


def emit(obj: ResultsTable | SummaryStats, fmt: Literal["csv", "json"], destination: str | Path | IO[bytes]) -> int:
    """Tabloyu veya özeti CSV/JSON olarak yazar; yazılan bayt sayısını döndürür."""
    data = render(obj, fmt).encode("utf-8")
    try:
        if isinstance(destination, (str, Path)):
            Path(destination).write_bytes(data)
        else:
            destination.write(data)
    except OSError as e:
        logger.exception("Sonuc yazilamadi")
        raise ResultsIOError(f"sonuc yazilamadi: {e}") from e
    return len(data)


def _parse_bool(text: str) -> bool:
    if text not in ("true", "false"):
        raise InvalidArgumentError(f"gecersiz detected degeri: {text!r}")
    return text == "true"


def read_results_csv(source: str | Path | IO[str]) -> ResultsTable:
    """emit ile yazılmış CSV'yi geri okur (config yankısı CSV'de yoktur)."""
    try:
        if isinstance(source, (str, Path)):
            text = Path(source).read_text(encoding="utf-8")
        else:
            text = source.read()
    except OSError as e:
        raise ResultsIOError(f"sonuc okunamadi: {e}") from e
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_COLUMNS:
        raise InvalidArgumentError(f"beklenmeyen CSV basligi: {header}")
    rows = []
    for record in reader:
        experiment, n, g, k, l, kind, repetition, trials, detected = record
        rows.append(
            Row(experiment, int(n), int(g), int(k), int(l), kind, int(repetition), int(trials), _parse_bool(detected))
        )
    return ResultsTable(tuple(rows))
