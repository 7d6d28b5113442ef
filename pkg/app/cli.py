"""Komut satırı arayüzü: üretim, enjeksiyon, kontrol, oracle, sınırlar, kampanya, demolar."""
import argparse
import json
import logging
import sys
from pathlib import Path

from app.campaign import emit, read_results_csv, render, run_campaign, summarize
from app.circuit import GatePolicy, random_circuit
from app.config import HOST, LOG_FORMAT, LOG_LEVEL, MAX_WIDTH, PORT, default_gate_count
from app.exceptions import EXIT_DETECTED, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, RevCheckError
from app.injection import (
    inject,
    random_injection_plan,
    record_from_document,
    record_to_document,
    replay,
    support,
)
from app.oracle import MASKING_FLIP_WIRE, and_cascade_demo, exact_detection_probability, worst_case_composition
from app.realfmt import parse_real, write_real
from app.rng import derive_stream
from app.schemas import (
    SCHEMAS,
    BoundResponse,
    CampaignConfig,
    DemoResponse,
    ExactProbabilityResponse,
    InjectionRecordDocument,
)
from app.stimuli import (
    CHECK_STREAM,
    ConfidenceSpec,
    check_equivalence,
    failure_probability_bounds,
    required_inputs,
)

logger = logging.getLogger(__name__)

# Komutlar arası akış indeksleri
GEN_STREAM = 0
INJECT_STREAM = 1


def _positive_int(text: str) -> int:
    value = _non_negative_int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"pozitif tamsayi bekleniyor: {text}")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tamsayi bekleniyor: {text}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"negatif olamaz: {text}")
    return value


def _line_count(text: str) -> int:
    value = _positive_int(text)
    if value > MAX_WIDTH:
        raise argparse.ArgumentTypeError(f"hat sayisi en fazla {MAX_WIDTH}: {text}")
    return value


def _seed(text: str) -> int:
    value = _non_negative_int(text)
    if value >= 2**64:
        raise argparse.ArgumentTypeError(f"tohum 64 bite sigmali: {text}")
    return value


def _policy(text: str) -> tuple[int, int]:
    """'MIN:MAX' kontrol sayısı aralığı."""
    try:
        low, high = (int(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"politika MIN:MAX biciminde olmali: {text}") from None
    if low < 0 or high < low:
        raise argparse.ArgumentTypeError(f"gecersiz kontrol araligi: {text}")
    return low, high


def _load(path: str):
    with open(path, encoding="utf-8") as f:
        return parse_real(f.read())


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def cmd_gen(args: argparse.Namespace) -> int:
    n = args.lines
    g = args.gates if args.gates is not None else default_gate_count(n)
    if args.policy is not None:
        policy = GatePolicy(args.policy[0], args.policy[1], args.negative_controls)
    else:
        default = GatePolicy.default(n)
        policy = GatePolicy(default.min_controls, default.max_controls, args.negative_controls)
    circuit = random_circuit(n, g, derive_stream(args.seed, GEN_STREAM), policy)
    _write_text(args.output, write_real(circuit))
    logger.info("Devre uretildi: n=%s g=%s", n, g)
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    golden = _load(args.golden).to_circuit()
    candidate = _load(args.candidate).to_circuit()
    outcome = check_equivalence(golden, candidate, derive_stream(args.seed, CHECK_STREAM), args.max_trials)
    if args.json:
        print(outcome.to_document().model_dump_json())
    else:
        print(f"status: {outcome.status}")
        print(f"trials_used: {outcome.trials_used}")
        print(f"max_trials: {outcome.max_trials}")
        if outcome.witness is not None:
            print(f"witness: {outcome.witness.to_binary()}")
    return EXIT_DETECTED if outcome.detected else EXIT_OK


def cmd_inject(args: argparse.Namespace) -> int:
    doc = _load(args.circuit)
    circuit = doc.to_circuit()
    stream = derive_stream(args.seed, INJECT_STREAM)
    specs = []
    if args.count:
        kind = "worst_case" if args.kind == "worst" else "random"
        specs = random_injection_plan(len(circuit), circuit.width, args.count, args.k, stream, kind=kind)
    corrupted, record = inject(circuit, specs, stream)
    _write_text(args.output, write_real(corrupted, doc.variables))
    if args.record:
        Path(args.record).write_text(
            record_to_document(record).model_dump_json(indent=2) + "\n", encoding="utf-8", newline="\n"
        )
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    doc = _load(args.circuit)
    record_doc = InjectionRecordDocument.model_validate_json(Path(args.record).read_text(encoding="utf-8"))
    corrupted = replay(doc.to_circuit(), record_from_document(record_doc))
    _write_text(args.output, write_real(corrupted, doc.variables))
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    golden = _load(args.golden).to_circuit()
    candidate = _load(args.candidate).to_circuit()
    probability = exact_detection_probability(golden, candidate)
    if args.json:
        print(
            ExactProbabilityResponse(
                numerator=probability.numerator,
                denominator=probability.denominator,
                probability=probability.value,
            ).model_dump_json()
        )
    else:
        print(probability)
    return EXIT_OK


def cmd_bound(args: argparse.Namespace) -> int:
    spec = ConfidenceSpec(args.k, args.delta)
    needed = required_inputs(spec)
    if args.json:
        bounds = failure_probability_bounds(args.k, needed)
        print(
            BoundResponse(
                k=args.k,
                delta=args.delta,
                required_inputs=needed,
                exact_worst_case=bounds.exact_worst_case,
                exp_bound=bounds.exp_bound,
            ).model_dump_json()
        )
    else:
        print(needed)
    return EXIT_OK


def cmd_campaign(args: argparse.Namespace) -> int:
    config = CampaignConfig.model_validate_json(Path(args.config).read_text(encoding="utf-8"))
    table = run_campaign(config, workers=args.workers, batch=args.batch)
    emit(table, args.format, args.output)
    if args.summary:
        emit(summarize(table), args.format, args.summary)
    logger.info("Kampanya tamamlandi: %s satir", len(table.rows))
    return EXIT_OK


def cmd_summarize(args: argparse.Namespace) -> int:
    stats = summarize(read_results_csv(args.results))
    if args.output in (None, "-"):
        sys.stdout.write(render(stats, args.format))
    else:
        emit(stats, args.format, args.output)
    return EXIT_OK


def cmd_demo(args: argparse.Namespace) -> int:
    if args.scenario == "masking":
        wire = MASKING_FLIP_WIRE if args.layer is None else (args.layer, args.index)
        detecting, total = and_cascade_demo(wire)
        response = DemoResponse(detecting=detecting, total=total)
    else:
        composition = worst_case_composition(args.lines)
        probability = exact_detection_probability(composition.ideal, composition.corrupted)
        lines = sorted(support(composition.effective_error, composition.effective_window))
        response = DemoResponse(detecting=probability.numerator, total=probability.denominator, support=lines)
    if args.json:
        print(response.model_dump_json())
        return EXIT_OK
    print(f"{response.detecting} / {response.total}")
    if response.support is not None:
        print(f"support: {' '.join(str(line) for line in response.support)} (size {len(response.support)})")
    return EXIT_OK


def cmd_schema(args: argparse.Namespace) -> int:
    print(json.dumps(SCHEMAS[args.name].model_json_schema(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("app.main:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="revcheck", description="Tersinir devrelerde hata tespiti")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="rastgele devre uret")
    p.add_argument("--lines", type=_line_count, required=True)
    p.add_argument("--gates", type=_non_negative_int)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--policy", type=_policy, help="kontrol sayisi araligi MIN:MAX")
    p.add_argument("--negative-controls", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("check", help="rastgele uyarilarla denklik kontrolu")
    p.add_argument("--golden", required=True)
    p.add_argument("--candidate", required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--max-trials", type=_positive_int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("inject", help="rastgele konumlara hata ekle")
    p.add_argument("--circuit", required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--kind", choices=("worst", "random"), default="worst")
    p.add_argument("--count", type=_non_negative_int, default=1)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--record")
    p.set_defaults(handler=cmd_inject)

    p = sub.add_parser("replay", help="kayittan bozuk devreyi yeniden kur")
    p.add_argument("--circuit", required=True)
    p.add_argument("--record", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_replay)

    p = sub.add_parser("oracle", help="kesin tespit olasiligi")
    p.add_argument("--golden", required=True)
    p.add_argument("--candidate", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("bound", help="gerekli girdi sayisi")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_bound)

    p = sub.add_parser("campaign", help="Monte-Carlo kampanyasi")
    p.add_argument("--config", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--summary")
    p.add_argument("--workers", type=_positive_int)
    p.add_argument("--batch", type=_positive_int, help="birlikte kosan tekrar sayisi; 1 = tek tek")
    p.set_defaults(handler=cmd_campaign)

    p = sub.add_parser("summarize", help="CSV sonuclarini ozetle")
    p.add_argument("--results", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(handler=cmd_summarize)

    p = sub.add_parser("demo", help="maskeleme ve en kotu durum demolari")
    p.add_argument("scenario", choices=("masking", "worstcase"))
    p.add_argument("--lines", type=_positive_int, default=6)
    p.add_argument("--layer", type=_non_negative_int)
    p.add_argument("--index", type=_non_negative_int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_demo)

    p = sub.add_parser("schema", help="JSON semasini yazdir")
    p.add_argument("name", choices=sorted(SCHEMAS))
    p.set_defaults(handler=cmd_schema)

    p = sub.add_parser("serve", help="HTTP servisini baslat")
    p.add_argument("--host", default=HOST)
    p.add_argument("--port", type=_positive_int, default=PORT)
    p.set_defaults(handler=cmd_serve)
    return parser


def _check_combinations(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    """Tek tek geçerli ama birlikte geçersiz bayraklar; parser.error çıkış kodu 2 verir."""
    if args.command == "gen" and args.policy is not None and args.policy[1] > args.lines - 1:
        low, high = args.policy
        parser.error(f"--policy {low}:{high} {args.lines} hatta sigmaz (en fazla {args.lines - 1} kontrol)")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_combinations(parser, args)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT, stream=sys.stderr)
    try:
        return args.handler(args)
    except RevCheckError as e:
        logger.error("%s: %s", e.kind, e)
        return EXIT_RUNTIME
    except OSError as e:
        logger.error("io-error: %s", e)
        return EXIT_RUNTIME
    except ValueError as e:
        # pydantic ValidationError (config/kayit dosyalari) ValueError'dur
        logger.error("invalid-argument: %s", e)
        return EXIT_RUNTIME
