"""
RevLib `.real` biçiminin belgelenmiş alt kümesi için okuyucu/yazıcı.

Kabul edilen alt küme (grammar/real_subset.ebnf):
  .version V | .numvars N | .variables a b ...
  .inputs / .outputs / .constants / .garbage   (saklanır, yorumlanmaz)
  .begin ... .end
  tK v1 ... vK    K-1 pozitif kontrol + hedef vK; '-' önekli kontrol negatif polaritedir
  '#' satır sonuna kadar yorumdur.
Fredkin (f), V/V+ kapıları ve diğer direktifler reddedilir.
"""
import re
from dataclasses import dataclass, field

from app.circuit import Circuit, Gate
from app.exceptions import InvalidArgumentError, RealParseError

DEFAULT_VERSION = "1.0"
PASSTHROUGH_DIRECTIVES = (".inputs", ".outputs", ".constants", ".garbage")
_GATE_RE = re.compile(r"^t(\d+)$")


@dataclass(frozen=True)
class RealDocument:
    version: str
    numvars: int
    variables: tuple[str, ...]
    gates: tuple[Gate, ...]
    comments: tuple[str, ...] = ()
    passthrough: tuple[tuple[str, str], ...] = field(default=())

    def to_circuit(self) -> Circuit:
        return Circuit(self.numvars, self.gates)


def _check_names(names: list[str] | tuple[str, ...]) -> None:
    for name in names:
        if not name or any(ch.isspace() for ch in name) or name[0] in "-#." or "#" in name:
            raise InvalidArgumentError(f"gecersiz degisken adi: {name!r}")
    if len(set(names)) != len(names):
        raise InvalidArgumentError(f"tekrarlanan degisken adi: {list(names)}")


def _parse_gate(tokens: list[str], index: dict[str, int], line_no: int) -> Gate:
    match = _GATE_RE.match(tokens[0].lower())
    if not match:
        raise RealParseError(line_no, f"desteklenmeyen kapi: {tokens[0]}")
    arity = int(match.group(1))
    operands = tokens[1:]
    if arity < 1 or len(operands) != arity:
        raise RealParseError(line_no, f"{tokens[0]} {arity} hat bekliyor, {len(operands)} verildi")
    resolved: list[tuple[int, bool]] = []
    for position, token in enumerate(operands):
        positive = not token.startswith("-")
        name = token if positive else token[1:]
        if name not in index:
            raise RealParseError(line_no, f"tanimsiz degisken: {name}")
        if not positive and position == arity - 1:
            raise RealParseError(line_no, f"hedef negatif olamaz: {token}")
        resolved.append((index[name], positive))
    lines = [line for line, _ in resolved]
    if len(set(lines)) != len(lines):
        raise RealParseError(line_no, f"ayni kapida tekrarlanan hat: {' '.join(operands)}")
    target = resolved[-1][0]
    return Gate(target, tuple(resolved[:-1]))


def parse_real(text: str) -> RealDocument:
    """`.real` metnini ayrıştırır; her hata 1 tabanlı satır numarası taşır."""
    version = DEFAULT_VERSION
    numvars: int | None = None
    variables: list[str] | None = None
    comments: list[str] = []
    passthrough: list[tuple[str, str]] = []
    gates: list[Gate] = []
    index: dict[str, int] = {}
    state = "header"
    last_line = 0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        last_line = line_no
        stripped = raw.strip()
        if stripped.startswith("#"):
            comments.append(raw)
            continue
        code = stripped.split("#", 1)[0].strip()
        if not code:
            continue
        if state == "done":
            raise RealParseError(line_no, f".end sonrasi icerik: {code}")
        tokens = code.split()
        head = tokens[0].lower()
        rest = code[len(tokens[0]):].strip()

        if state == "body":
            if head == ".end":
                state = "done"
            elif head.startswith("."):
                raise RealParseError(line_no, f"govde icinde direktif: {tokens[0]}")
            else:
                gates.append(_parse_gate(tokens, index, line_no))
            continue

        if head == ".version":
            version = rest
        elif head == ".numvars":
            try:
                numvars = int(rest)
            except ValueError:
                raise RealParseError(line_no, f"gecersiz .numvars: {rest!r}") from None
            if numvars < 1:
                raise RealParseError(line_no, f".numvars pozitif olmali: {numvars}")
        elif head == ".variables":
            variables = tokens[1:]
            try:
                _check_names(variables)
            except InvalidArgumentError as e:
                raise RealParseError(line_no, str(e)) from None
        elif head in PASSTHROUGH_DIRECTIVES:
            passthrough.append((head, rest))
        elif head == ".begin":
            if numvars is None or variables is None:
                raise RealParseError(line_no, ".begin oncesi .numvars ve .variables gerekli")
            if len(variables) != numvars:
                raise RealParseError(
                    line_no, f".numvars {numvars} ama {len(variables)} degisken tanimli"
                )
            index = {name: i for i, name in enumerate(variables)}
            state = "body"
        elif head == ".end":
            raise RealParseError(line_no, ".begin olmadan .end")
        elif head.startswith("."):
            raise RealParseError(line_no, f"bilinmeyen direktif: {tokens[0]}")
        else:
            raise RealParseError(line_no, f"govde disinda kapi: {tokens[0]}")

    if state == "header":
        raise RealParseError(max(last_line, 1), ".begin eksik")
    if state == "body":
        raise RealParseError(max(last_line, 1), ".end eksik")
    try:
        return RealDocument(
            version=version,
            numvars=numvars,
            variables=tuple(variables),
            gates=tuple(gates),
            comments=tuple(comments),
            passthrough=tuple(passthrough),
        )
    except InvalidArgumentError as e:
        raise RealParseError(max(last_line, 1), str(e)) from None


def default_names(width: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(width))


def _gate_line(gate: Gate, names: tuple[str, ...] | list[str]) -> str:
    operands = [names[line] if positive else f"-{names[line]}" for line, positive in gate.controls]
    operands.append(names[gate.target])
    return f"t{len(operands)} " + " ".join(operands)


def _render(
    width: int,
    gates: tuple[Gate, ...],
    names: tuple[str, ...],
    version: str = DEFAULT_VERSION,
    comments: tuple[str, ...] = (),
    passthrough: tuple[tuple[str, str], ...] = (),
) -> str:
    out = list(comments)
    out.append(f".version {version}".rstrip())
    out.append(f".numvars {width}")
    out.append(".variables " + " ".join(names))
    for directive, value in passthrough:
        out.append(f"{directive} {value}".rstrip())
    out.append(".begin")
    out.extend(_gate_line(gate, names) for gate in gates)
    out.append(".end")
    return "\n".join(out) + "\n"


def write_real(circuit: Circuit, names: list[str] | tuple[str, ...] | None = None) -> str:
    """Kanonik yazım: satır başına bir kapı, küçük harf direktifler, LF sonlu."""
    names = tuple(names) if names is not None else default_names(circuit.width)
    if len(names) != circuit.width:
        raise InvalidArgumentError(f"{circuit.width} hat icin {len(names)} ad verildi")
    _check_names(names)
    return _render(circuit.width, circuit.gates, names)


def write_document(doc: RealDocument) -> str:
    """Yorumlar ve geçiş direktifleriyle birlikte belgeyi yazar."""
    return _render(
        doc.numvars,
        doc.gates,
        doc.variables,
        version=doc.version or DEFAULT_VERSION,
        comments=doc.comments,
        passthrough=doc.passthrough,
    )


def read_circuit(path) -> Circuit:
    """Dosyadan devre okur."""
    with open(path, encoding="utf-8") as f:
        return parse_real(f.read()).to_circuit()
