"""Pydantic şemaları: kayıtlar, sonuçlar, kampanya yapılandırması ve HTTP gövdeleri."""
from typing import Literal

from pydantic import BaseModel, Field, model_validator

from app.config import DEFAULT_REPETITIONS, MAX_WIDTH, SUPPORT_MAX_LINES

SCHEMA_VERSION = 1
U64_MAX = 2**64 - 1


class ControlDocument(BaseModel):
    line: int = Field(..., ge=0, lt=MAX_WIDTH)
    positive: bool = True


class GateDocument(BaseModel):
    target: int = Field(..., ge=0, lt=MAX_WIDTH)
    controls: list[ControlDocument] = []


class CircuitDocument(BaseModel):
    width: int = Field(..., ge=1, le=MAX_WIDTH)
    gates: list[GateDocument] = []


class SourceDocument(BaseModel):
    width: int = Field(..., ge=1, le=MAX_WIDTH)
    gate_count: int = Field(..., ge=0)
    digest: str = Field(..., min_length=64, max_length=64)


class WindowDocument(BaseModel):
    start: int = Field(..., ge=0)
    k: int = Field(..., ge=1)


class InjectionRecordDocument(BaseModel):
    schema_version: Literal[1] = SCHEMA_VERSION
    source: SourceDocument
    positions: list[int]
    windows: list[WindowDocument]
    errors: list[CircuitDocument]

    @model_validator(mode="after")
    def _same_lengths(self):
        if not len(self.positions) == len(self.windows) == len(self.errors):
            raise ValueError("positions, windows ve errors ayni uzunlukta olmali")
        return self


class TrialOutcomeDocument(BaseModel):
    status: Literal["detected", "exhausted"]
    trials_used: int = Field(..., ge=1)
    max_trials: int = Field(..., ge=1)
    witness: str | None = Field(None, pattern=r"^[01]+$")


class CampaignConfig(BaseModel):
    """Bildirimsel deney tanımı; JSON yapılandırma dosyaları bununla doğrulanır."""

    experiment: Literal["single_error_scaling", "multi_error", "cdf_comparison"]
    n_values: list[int] = Field(..., min_length=1)
    gate_count: int | None = Field(None, ge=0)
    k_values: list[int] = Field(..., min_length=1)
    l_values: list[int] = Field([1], min_length=1)
    error_kind: Literal["worst_case", "random"] = "worst_case"
    repetitions: int = Field(DEFAULT_REPETITIONS, ge=1)
    master_seed: int = Field(..., ge=0, le=U64_MAX)
    max_trials: int | None = Field(None, ge=1)
    isolate_error: bool = False
    max_controls: int | None = Field(None, ge=0)
    negative_controls: bool = False
    error_sequence_length: int | None = Field(None, ge=1)
    error_max_attempts: int | None = Field(None, ge=1)

    @model_validator(mode="after")
    def _check_grid(self):
        if any(not 1 <= n <= MAX_WIDTH for n in self.n_values):
            raise ValueError(f"n degerleri 1..{MAX_WIDTH} araliginda olmali")
        if any(k < 1 for k in self.k_values) or max(self.k_values) > min(self.n_values):
            raise ValueError("her k icin 1 <= k <= min(n_values) olmali")
        if any(l < 1 for l in self.l_values):
            raise ValueError("l degerleri pozitif olmali")
        if self.experiment == "single_error_scaling" and self.l_values != [1]:
            raise ValueError("single_error_scaling deneyi l_values = [1] gerektirir")
        if self.experiment == "cdf_comparison" and "error_kind" not in self.model_fields_set:
            raise ValueError("cdf_comparison deneyinde error_kind acikca verilmeli")
        if self.error_kind == "random" and max(self.k_values) > SUPPORT_MAX_LINES:
            raise ValueError(f"rastgele hatalar en fazla {SUPPORT_MAX_LINES} hatlik pencerede uretilebilir")
        return self


class ResultRow(BaseModel):
    experiment: str
    n: int
    g: int
    k: int
    l: int
    error_kind: str
    repetition: int
    trials_used: int
    detected: bool


class ResultsDocument(BaseModel):
    code_version: str
    config: CampaignConfig | None = None
    max_trials: dict[int, int] = {}
    rows: list[ResultRow]


class SummaryRow(BaseModel):
    n: int
    k: int
    l: int
    error_kind: str
    samples: int
    detected: int
    undetected: int
    mean: float | None
    median: float | None
    best_case: float
    cdf: list[tuple[int, float]]
    best_case_cdf: list[float]


class SummaryDocument(BaseModel):
    code_version: str
    groups: list[SummaryRow]


class CheckRequest(BaseModel):
    golden: str = Field(..., min_length=1)
    candidate: str = Field(..., min_length=1)
    seed: int = Field(..., ge=0, le=U64_MAX)
    max_trials: int | None = Field(None, ge=1)


class OracleRequest(BaseModel):
    golden: str = Field(..., min_length=1)
    candidate: str = Field(..., min_length=1)


class ExactProbabilityResponse(BaseModel):
    numerator: int
    denominator: int
    probability: float


class BoundResponse(BaseModel):
    k: int
    delta: float
    required_inputs: int
    exact_worst_case: float
    exp_bound: float


class DemoResponse(BaseModel):
    detecting: int
    total: int
    support: list[int] | None = None


SCHEMAS = {
    "record": InjectionRecordDocument,
    "outcome": TrialOutcomeDocument,
    "config": CampaignConfig,
    "results": ResultsDocument,
    "summary": SummaryDocument,
}
