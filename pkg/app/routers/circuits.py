"""Devre kontrol, oracle, sınır ve demo route'ları."""
import logging

from fastapi import APIRouter, HTTPException, Query

from app.exceptions import CapacityExceededError, RevCheckError, SamplingFailureError
from app.injection import support
from app.oracle import MASKING_FLIP_WIRE, and_cascade_demo, exact_detection_probability, worst_case_composition
from app.realfmt import parse_real
from app.rng import derive_stream
from app.schemas import (
    BoundResponse,
    CheckRequest,
    DemoResponse,
    ExactProbabilityResponse,
    OracleRequest,
    TrialOutcomeDocument,
)
from app.stimuli import (
    CHECK_STREAM,
    ConfidenceSpec,
    check_equivalence,
    failure_probability_bounds,
    required_inputs,
)

logger = logging.getLogger(__name__)

router = APIRouter(prefix="", tags=["circuits"])


def _http_error(e: RevCheckError) -> HTTPException:
    if isinstance(e, CapacityExceededError):
        status = 413
    elif isinstance(e, SamplingFailureError):
        status = 422
    else:
        status = 400
    logger.warning("Istek reddedildi (%s): %s", e.kind, e)
    return HTTPException(status_code=status, detail={"kind": e.kind, "message": str(e)})


@router.post("/check", response_model=TrialOutcomeDocument)
async def check(body: CheckRequest):
    """İki `.real` metnini rastgele uyarılarla karşılaştırır."""
    try:
        golden = parse_real(body.golden).to_circuit()
        candidate = parse_real(body.candidate).to_circuit()
        outcome = check_equivalence(golden, candidate, derive_stream(body.seed, CHECK_STREAM), body.max_trials)
    except RevCheckError as e:
        raise _http_error(e) from e
    return outcome.to_document()


@router.post("/oracle", response_model=ExactProbabilityResponse)
async def oracle(body: OracleRequest):
    """Kesin tespit olasılığı (tam numaralandırma)."""
    try:
        probability = exact_detection_probability(
            parse_real(body.golden).to_circuit(), parse_real(body.candidate).to_circuit()
        )
    except RevCheckError as e:
        raise _http_error(e) from e
    return ExactProbabilityResponse(
        numerator=probability.numerator,
        denominator=probability.denominator,
        probability=probability.value,
    )


@router.get("/bound", response_model=BoundResponse)
async def bound(k: int = Query(..., ge=1), delta: float = Query(...)):
    try:
        needed = required_inputs(ConfidenceSpec(k, delta))
    except RevCheckError as e:
        raise _http_error(e) from e
    bounds = failure_probability_bounds(k, needed)
    return BoundResponse(
        k=k,
        delta=delta,
        required_inputs=needed,
        exact_worst_case=bounds.exact_worst_case,
        exp_bound=bounds.exp_bound,
    )


@router.get("/demo/masking", response_model=DemoResponse)
async def demo_masking(layer: int = MASKING_FLIP_WIRE[0], index: int = MASKING_FLIP_WIRE[1]):
    """Tersinir olmayan AND ağacında maskeleme."""
    try:
        detecting, total = and_cascade_demo((layer, index))
    except RevCheckError as e:
        raise _http_error(e) from e
    return DemoResponse(detecting=detecting, total=total)


@router.get("/demo/worstcase", response_model=DemoResponse)
async def demo_worstcase(lines: int = Query(6, ge=2)):
    """İki bit-çevirme hatasının (n-1) boyutlu etkin hataya dönüşmesi."""
    try:
        composition = worst_case_composition(lines)
        probability = exact_detection_probability(composition.ideal, composition.corrupted)
        effective = sorted(support(composition.effective_error, composition.effective_window))
    except RevCheckError as e:
        raise _http_error(e) from e
    return DemoResponse(detecting=probability.numerator, total=probability.denominator, support=effective)
