"""Expression parser, map-spec file loader, and the JSON report type.

The concrete syntax covers exactly what the shipped table files and custom
map specs need: rational literals, declared symbols, + - * / ^ with integer
exponents, unary minus, and parentheses.  Map-spec files are line oriented
(`kind:` header, `key = expression` fields, `#` comments) so the table
corpus stays diff-able.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import RESERVED_NAMES, RationalFunction, symbol
from .ybmaps import CheckReport

TOOL_VERSION = "0.1.0"


class ParseError(Exception):
    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected one of: {', '.join(expected)})"
        super().__init__(detail)


class UndeclaredSymbol(Exception):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"undeclared symbol {name!r}")


class SpecError(Exception):
    pass


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "ExprAST"


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * /
    left: "ExprAST"
    right: "ExprAST"


@dataclass(frozen=True)
class Pow:
    base: "ExprAST"
    exponent: int


ExprAST = Num | Sym | Neg | BinOp | Pow


# ---------------------------------------------------------------------------
# tokenizer / parser
# ---------------------------------------------------------------------------

_OPS = "+-*/^()"


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPS:
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("num", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2], (kind,))
        return self.advance()

    def expr(self) -> ExprAST:
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> ExprAST:
        node = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.advance()[0]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> ExprAST:
        if self.peek()[0] == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> ExprAST:
        base = self.atom()
        if self.peek()[0] == "^":
            self.advance()
            tok = self.peek()
            if tok[0] != "num":
                raise ParseError(
                    "exponent must be a non-negative integer literal",
                    tok[2],
                    ("num",),
                )
            self.advance()
            return Pow(base, int(tok[1]))
        return base

    def atom(self) -> ExprAST:
        tok = self.peek()
        if tok[0] == "num":
            self.advance()
            return Num(Fraction(int(tok[1])))
        if tok[0] == "name":
            self.advance()
            return Sym(tok[1])
        if tok[0] == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(
            f"unexpected token {tok[1]!r}", tok[2], ("num", "name", "(")
        )


def parse_expression(text: str) -> ExprAST:
    """Parse with precedence ^ > unary minus > * / > + -, left associative."""
    if not text.strip():
        raise ParseError("empty expression", 0, ("num", "name", "("))
    parser = _Parser(_tokenize(text))
    node = parser.expr()
    tok = parser.peek()
    if tok[0] != "end":
        raise ParseError(f"trailing input {tok[1]!r}", tok[2], ("end",))
    return node


# ---------------------------------------------------------------------------
# printing and lowering
# ---------------------------------------------------------------------------

def _prec(node: ExprAST) -> int:
    if isinstance(node, (Num, Sym)):
        return 9
    if isinstance(node, Pow):
        return 4
    if isinstance(node, Neg):
        return 3
    return 2 if node.op in "*/" else 1


def to_text(node: ExprAST) -> str:
    """Pretty-print; re-parsing yields an expression with equal lowering."""
    if isinstance(node, Num):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        if _prec(node.operand) < _prec(node):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Pow):
        base = to_text(node.base)
        if _prec(node.base) < 9:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    lt, rt = to_text(node.left), to_text(node.right)
    if _prec(node.left) < _prec(node):
        lt = f"({lt})"
    if _prec(node.right) <= _prec(node):
        rt = f"({rt})"
    return f"{lt} {node.op} {rt}"


def lower_ast(node: ExprAST, declared: set[str] | None = None) -> RationalFunction:
    """Lower an AST to an exact rational function over QQ.

    Reserved names are always available; any other symbol must appear in
    `declared`, otherwise UndeclaredSymbol is raised.
    """
    allowed = set(RESERVED_NAMES) | (declared or set())
    if isinstance(node, Num):
        return RationalFunction.constant(node.value)
    if isinstance(node, Sym):
        if node.name not in allowed:
            raise UndeclaredSymbol(node.name)
        return RationalFunction.variable(symbol(node.name))
    if isinstance(node, Neg):
        return -lower_ast(node.operand, declared)
    if isinstance(node, Pow):
        return lower_ast(node.base, declared) ** node.exponent
    left = lower_ast(node.left, declared)
    right = lower_ast(node.right, declared)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if right.is_zero():
        raise SpecError("division by an identically zero expression")
    return left / right


# ---------------------------------------------------------------------------
# map-spec files
# ---------------------------------------------------------------------------

_REQUIRED_FIELDS = {
    "yang_baxter": ("f", "g"),
    "reflection": ("h", "sigma"),
    "symmetry": ("s",),
}
_OPTIONAL_FIELDS = {
    "yang_baxter": (),
    "reflection": ("phi",),
    "symmetry": (),
}
_FIELD_KEYWORDS = {
    "sigma": ("free",),
    "phi": ("inf",),
}


@dataclass
class MapSpec:
    """Parsed and validated contents of one map-spec file."""

    kind: str
    name: str
    declared_symbols: list[str]
    asts: dict[str, ExprAST]
    keywords: dict[str, str] = field(default_factory=dict)
    path: str = ""

    def has(self, key: str) -> bool:
        return key in self.asts or key in self.keywords

    def keyword(self, key: str) -> str | None:
        return self.keywords.get(key)

    def lower(self, key: str) -> RationalFunction:
        return lower_ast(self.asts[key], set(self.declared_symbols))


def load_map_spec(path) -> MapSpec:
    """Load and validate a map-spec file; all expressions must lower."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    kind = ""
    name = ""
    declared: list[str] = []
    asts: dict[str, ExprAST] = {}
    keywords: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line and ":" not in line.split("=", 1)[0]:
            key, rhs = (part.strip() for part in line.split("=", 1))
            if not key.isidentifier():
                raise SpecError(f"{path}:{lineno}: bad field name {key!r}")
            if key in asts or key in keywords:
                raise SpecError(f"{path}:{lineno}: duplicate field {key!r}")
            if rhs in _FIELD_KEYWORDS.get(key, ()):
                keywords[key] = rhs
                continue
            try:
                asts[key] = parse_expression(rhs)
            except ParseError as exc:
                raise SpecError(f"{path}:{lineno}: field {key!r}: {exc}") from exc
            continue
        if ":" in line:
            head, rhs = (part.strip() for part in line.split(":", 1))
            if head == "kind":
                kind = rhs
            elif head == "name":
                name = rhs
            elif head == "symbols":
                declared = rhs.split()
            else:
                raise SpecError(f"{path}:{lineno}: unknown header {head!r}")
            continue
        raise SpecError(f"{path}:{lineno}: unparseable line {raw!r}")
    if kind not in _REQUIRED_FIELDS:
        raise SpecError(f"{path}: missing or unknown kind {kind!r}")
    for req in _REQUIRED_FIELDS[kind]:
        if req not in asts and req not in keywords:
            raise SpecError(f"missing field {req}")
    known = set(_REQUIRED_FIELDS[kind]) | set(_OPTIONAL_FIELDS[kind])
    for key in list(asts) + list(keywords):
        if key not in known:
            raise SpecError(f"{path}: unknown field {key!r} for kind {kind}")
    spec = MapSpec(kind, name, declared, asts, keywords, str(path))
    for key in spec.asts:
        spec.lower(key)  # raises UndeclaredSymbol on bad symbols
    return spec


def mapspec_to_reflection(spec: MapSpec):
    """Build a ReflectionMap (and optional phi) from a reflection spec."""
    from .ybmaps import ReflectionMap

    if spec.kind != "reflection":
        raise SpecError(f"expected a reflection spec, got kind {spec.kind!r}")
    h = spec.lower("h")
    sigma = None if spec.keyword("sigma") == "free" else spec.lower("sigma")
    refl = ReflectionMap(h=h, sigma=sigma, name=spec.name or "reflection_map")
    phi = None
    phi_is_infinity = False
    if spec.has("phi"):
        if spec.keyword("phi") == "inf":
            phi_is_infinity = True
        else:
            phi = spec.lower("phi")
    return refl, phi, phi_is_infinity


def mapspec_to_yang_baxter(spec: MapSpec):
    from .ybmaps import YangBaxterMap

    if spec.kind != "yang_baxter":
        raise SpecError(f"expected a yang_baxter spec, got kind {spec.kind!r}")
    return YangBaxterMap(
        f=spec.lower("f"), g=spec.lower("g"), family_id=spec.name or "custom"
    )


def mapspec_to_symmetry(spec: MapSpec):
    from .ybmaps import SymmetryMap

    if spec.kind != "symmetry":
        raise SpecError(f"expected a symmetry spec, got kind {spec.kind!r}")
    return SymmetryMap(s=spec.lower("s"), name=spec.name or "symmetry")


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def digest_inputs(parts: list[str | bytes]) -> str:
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, str):
            part = part.encode("utf-8")
        h.update(part)
        h.update(b"\x00")
    return "sha256:" + h.hexdigest()


@dataclass
class Report:
    """One CLI invocation's outcome; serialization is bit-reproducible."""

    command: list[str]
    inputs_digest: str
    checks: list[CheckReport]
    rng_seed: int
    tool_version: str = TOOL_VERSION
    schema: int = 1

    @property
    def overall(self) -> str:
        return "pass" if all(c.passed for c in self.checks) else "fail"

    def to_json(self) -> dict:
        return {
            "schema": self.schema,
            "tool_version": self.tool_version,
            "command": list(self.command),
            "inputs_digest": self.inputs_digest,
            "rng_seed": self.rng_seed,
            "overall": self.overall,
            "checks": [c.to_json() for c in self.checks],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False)
