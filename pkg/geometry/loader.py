"""
Loader for the sectioned `.geo` geometry format.

    # comment
    [geometry]      name = ..., order = N
    [algebra]       kind = polynomial|torus, dim = n
    [symmetry]      generators = m, Z[a](x[j]) = <expr>
    [twist]         (a, b, "c")
    [frame]         rank = r, e[i](x[j]) = <expr>, Z[a] |> e[i] = <comb>,
                    Z[a] |> w[i] = <comb>, C[i,j,k] = <expr>
    [metric]        g[i,j] = <expr>, g0_inverse = [[...], ...]
    [suite]         seed = S, samples = K

Indices are 1-based in the file and 0-based everywhere else. Torus
generators may be written U[j] instead of x[j].
"""

import hashlib
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .algebra import Algebra, Derivation
from .exceptions import ParseError, SpecError
from .expressions import parse_expression
from .modules import FrameSpec, ModuleContext
from .riemann import metric_from_components
from .scalars import ZERO, GaussianRational
from .symmetry import TwistPair, TwistSpec

logger = logging.getLogger(__name__)

SHIPPED_DIR = Path(__file__).resolve().parent / "geometries"
SUFFIX = ".geo"
REQUIRED_SECTIONS = ("geometry", "algebra", "frame", "metric")
KNOWN_SECTIONS = REQUIRED_SECTIONS + ("symmetry", "twist", "suite")

SECTION_RE = re.compile(r"^\[(?P<name>[a-z_]+)\]$")
KEY_RE = re.compile(r"^(?P<key>[A-Za-z_0-9]+)\s*=\s*(?P<value>.*)$")
ACTION_RE = re.compile(r"^Z\[(?P<a>\d+)\]\((?:x|U)\[(?P<j>\d+)\]\)\s*=\s*")
FRAME_RE = re.compile(r"^e\[(?P<i>\d+)\]\((?:x|U)\[(?P<j>\d+)\]\)\s*=\s*")
FRAME_ACTION_RE = re.compile(r"^Z\[(?P<a>\d+)\]\s*\|>\s*(?P<kind>[ew])\[(?P<i>\d+)\]\s*=\s*")
STRUCTURE_RE = re.compile(r"^C\[(?P<i>\d+),\s*(?P<j>\d+),\s*(?P<k>\d+)\]\s*=\s*")
METRIC_RE = re.compile(r"^g\[(?P<i>\d+),\s*(?P<j>\d+)\]\s*=\s*")
TWIST_RE = re.compile(r'^\(\s*(?P<a>\d+)\s*,\s*(?P<b>\d+)\s*,\s*"(?P<c>[^"]*)"\s*\)$')
COMB_TERM_RE = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?:(?P<coeff>\([^()]*\)|[0-9/]+(?:\s*\*?\s*i)?|i)\s*\*?\s*)?"
    r"(?P<letter>[ew])\[(?P<index>\d+)\]\s*"
)


@dataclass
class Line:
    number: int
    text: str
    column: int = 1


@dataclass
class GeometrySpec:
    name: str
    order: int
    algebra: Algebra
    ctx: ModuleContext
    metric: object
    metric_table: dict = field(default_factory=dict)
    seed: int = None
    samples: int = None
    digest: str = ""
    source: str = ""

    @property
    def rank(self):
        return self.ctx.rank


def _split_sections(text):
    sections = {}
    current = None
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        column = len(stripped) - len(stripped.lstrip()) + 1
        stripped = stripped.strip()
        header = SECTION_RE.match(stripped)
        if header:
            current = header.group("name")
            if current not in KNOWN_SECTIONS:
                raise ParseError(f"unknown section [{current}]", line=number, column=column)
            if current in sections:
                raise ParseError(f"duplicate section [{current}]", line=number, column=column)
            sections[current] = []
            continue
        if current is None:
            raise ParseError("content before the first section header", line=number, column=column)
        sections[current].append(Line(number, stripped, column))
    for name in REQUIRED_SECTIONS:
        if name not in sections:
            raise SpecError(f"missing section [{name}]")
    return sections


def _keys(lines):
    """Split key = value lines from the rest."""
    values = {}
    rest = []
    for line in lines:
        match = KEY_RE.match(line.text)
        if match and not any(ch in match.group("key") for ch in "[("):
            values[match.group("key")] = (line, match.group("value").strip())
        else:
            rest.append(line)
    return values, rest


def _integer(values, key, default=None):
    if key not in values:
        if default is None:
            raise SpecError(f"missing key {key!r}")
        return default
    line, text = values[key]
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{key} must be an integer, got {text!r}", line=line.number, column=line.column) from None


def _index(line, text, bound, what):
    value = int(text)
    if not 1 <= value <= bound:
        raise ParseError(f"{what} index {value} out of range 1..{bound}", line=line.number, column=line.column)
    return value - 1


def _expression(line, match, algebra):
    src = line.text[match.end():]
    try:
        return parse_expression(src, algebra)
    except ParseError as exc:
        raise exc.shifted(line.number, line.column - 1 + match.end()) from None


def _combination(line, match, algebra, rank, letter):
    """Linear combination of e[j] (or w[j]) as a row of algebra elements.

    Coefficients are rationals, i, or any parenthesized expression.
    """
    src = line.text[match.end():]
    row = [algebra.zero()] * rank
    position = 0
    if src.strip() == "0":
        return tuple(row)
    while position < len(src):
        term = COMB_TERM_RE.match(src, position)
        if term is None or term.end() == position:
            raise ParseError(
                "symmetry action on the frame must be a combination of frame elements",
                line=line.number,
                column=line.column + match.end() + position,
            )
        if term.group("letter") != letter:
            raise SpecError(f"line {line.number}: expected {letter}[j] terms")
        coeff = term.group("coeff")
        if coeff is None:
            value = algebra.one()
        elif coeff.startswith("("):
            try:
                value = parse_expression(coeff[1:-1], algebra)
            except ParseError as exc:
                offset = line.column + match.end() + term.start("coeff")
                raise exc.shifted(line.number, offset) from None
        else:
            compact = coeff.replace("*", "").replace(" ", "")
            value = algebra.constant(GaussianRational.from_text(compact))
        if term.group("sign") == "-":
            value = -value
        j = _index(line, term.group("index"), rank, "frame")
        row[j] = row[j] + value
        position = term.end()
    return tuple(row)


def _algebra_section(sections):
    values, rest = _keys(sections["algebra"])
    if rest:
        raise ParseError("unexpected line in [algebra]", line=rest[0].number, column=rest[0].column)
    if "kind" not in values:
        raise SpecError("missing key 'kind' in [algebra]")
    kind = values["kind"][1]
    dim = _integer(values, "dim")
    return kind, dim


def _symmetry_section(lines, kind, dim, order):
    values, rest = _keys(lines)
    generators = _integer(values, "generators", default=0)
    plain = Algebra(kind, dim, order, (), TwistSpec(0))
    actions = [[{} for _ in range(dim)] for _ in range(generators)]
    for line in rest:
        match = ACTION_RE.match(line.text)
        if not match:
            raise ParseError("expected Z[a](x[j]) = <expr>", line=line.number, column=line.column)
        a = _index(line, match.group("a"), generators, "symmetry generator")
        j = _index(line, match.group("j"), dim, "algebra generator")
        actions[a][j] = dict(_expression(line, match, plain).terms)
    return generators, [Derivation(values) for values in actions]


def _twist_section(lines, generators):
    pairs = []
    for line in lines:
        match = TWIST_RE.match(line.text)
        if not match:
            raise ParseError('expected (a, b, "c")', line=line.number, column=line.column)
        try:
            coefficient = GaussianRational.from_text(match.group("c"))
        except ValueError as exc:
            raise ParseError(str(exc), line=line.number, column=line.column) from None
        a, b = int(match.group("a")), int(match.group("b"))
        if not (1 <= a <= generators and 1 <= b <= generators):
            raise SpecError(
                f"line {line.number}: twist references a generator outside Z[1]..Z[{generators}]"
            )
        pairs.append(TwistPair(a - 1, b - 1, coefficient))
    return TwistSpec(generators, tuple(pairs))


def _frame_section(lines, algebra, degree_bound):
    values, rest = _keys(lines)
    rank = _integer(values, "rank")
    generators = algebra.generators
    derivations = [[{} for _ in range(algebra.dim)] for _ in range(rank)]
    symmetry = [[[ZERO] * rank for _ in range(rank)] for _ in range(generators)]
    dual = None
    structure = {}
    for line in rest:
        if match := FRAME_RE.match(line.text):
            i = _index(line, match.group("i"), rank, "frame")
            j = _index(line, match.group("j"), algebra.dim, "algebra generator")
            derivations[i][j] = dict(_expression(line, match, algebra).terms)
        elif match := FRAME_ACTION_RE.match(line.text):
            a = _index(line, match.group("a"), generators, "symmetry generator")
            i = _index(line, match.group("i"), rank, "frame")
            kind = match.group("kind")
            row = _combination(line, match, algebra, rank, kind)
            if kind == "e":
                symmetry[a][i] = list(row)
            else:
                if dual is None:
                    dual = [[[ZERO] * rank for _ in range(rank)] for _ in range(generators)]
                dual[a][i] = list(row)
        elif match := STRUCTURE_RE.match(line.text):
            i = _index(line, match.group("i"), rank, "frame")
            j = _index(line, match.group("j"), rank, "frame")
            k = _index(line, match.group("k"), rank, "frame")
            entry = structure.setdefault((i, j), [algebra.zero()] * rank)
            entry[k] = _expression(line, match, algebra)
        else:
            raise ParseError("unexpected line in [frame]", line=line.number, column=line.column)
    frame = FrameSpec(
        rank=rank,
        derivations=tuple(Derivation(values) for values in derivations),
        symmetry=tuple(tuple(tuple(row) for row in matrix) for matrix in symmetry),
        structure=structure,
        dual_symmetry=None if dual is None else tuple(tuple(tuple(row) for row in m) for m in dual),
    )
    return ModuleContext(algebra, frame, degree_bound=degree_bound)


def _matrix(line, text):
    rows = re.findall(r"\[([^\[\]]*)\]", text)
    if not rows:
        raise ParseError("expected a matrix [[...], ...]", line=line.number, column=line.column)
    try:
        return [[GaussianRational.from_text(v.strip()) for v in row.split(",")] for row in rows]
    except ValueError as exc:
        raise ParseError(str(exc), line=line.number, column=line.column) from None


def _metric_section(lines, ctx):
    values, rest = _keys(lines)
    table = {}
    for line in rest:
        match = METRIC_RE.match(line.text)
        if not match:
            raise ParseError("expected g[i,j] = <expr>", line=line.number, column=line.column)
        i = _index(line, match.group("i"), ctx.rank, "frame")
        j = _index(line, match.group("j"), ctx.rank, "frame")
        table[(i, j)] = _expression(line, match, ctx.algebra)
    g0_inverse = None
    if "g0_inverse" in values:
        g0_inverse = _matrix(*values["g0_inverse"])
    return table, metric_from_components(ctx, table, g0_inverse)


def parse_geometry(text, default_order=2, degree_bound=2, order=None, source=""):
    """Build and validate a GeometrySpec from .geo text."""
    sections = _split_sections(text)
    header, rest = _keys(sections["geometry"])
    if rest:
        raise ParseError("unexpected line in [geometry]", line=rest[0].number, column=rest[0].column)
    if "name" not in header:
        raise SpecError("missing key 'name' in [geometry]")
    name = header["name"][1]
    if order is None:
        order = _integer(header, "order", default=default_order)
    if order < 0:
        raise SpecError("truncation order must be non-negative")

    kind, dim = _algebra_section(sections)
    generators, actions = _symmetry_section(sections.get("symmetry", []), kind, dim, order)
    twist = _twist_section(sections.get("twist", []), generators)
    algebra = Algebra(kind, dim, order, actions, twist)
    algebra.check_commuting_actions(degree_bound)
    ctx = _frame_section(sections["frame"], algebra, degree_bound)
    table, metric = _metric_section(sections["metric"], ctx)

    suite, extra = _keys(sections.get("suite", []))
    if extra:
        raise ParseError("unexpected line in [suite]", line=extra[0].number, column=extra[0].column)
    spec = GeometrySpec(
        name=name,
        order=order,
        algebra=algebra,
        ctx=ctx,
        metric=metric,
        metric_table=table,
        seed=_integer(suite, "seed") if "seed" in suite else None,
        samples=_integer(suite, "samples") if "samples" in suite else None,
        digest=hashlib.sha256(text.encode("utf-8")).hexdigest(),
        source=source,
    )
    logger.info("geometry %s loaded: %s, dim %d, rank %d, order %d", name, kind, dim, ctx.rank, order)
    return spec


def load_geometry(path, default_order=2, degree_bound=2, order=None):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise SpecError(f"geometry file not found: {path}") from None
    return parse_geometry(text, default_order, degree_bound, order, source=str(path))


def shipped_geometries(directory=SHIPPED_DIR):
    return sorted(p.stem for p in Path(directory).glob(f"*{SUFFIX}"))


def resolve_geometry(name, directory=SHIPPED_DIR):
    """Path of a shipped geometry by name, or of an explicit file path."""
    candidate = Path(name)
    if candidate.suffix == SUFFIX and candidate.exists():
        return candidate
    path = Path(directory) / f"{candidate.stem}{SUFFIX}"
    if not path.exists():
        raise FileNotFoundError(f"unknown geometry {name!r}")
    return path
