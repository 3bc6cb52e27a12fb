"""Small expression language for user-defined planar maps and candidate
metric functions.

Grammar (precedence low to high, left-associative except for ^):

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' ['-'] INT)?          (integer exponent in [-8, 8])
    atom    := NUMBER | NAME | NAME '(' args ')' | '(' sum ')'

Calls: abs, sqrt, exp, log, sign (1 argument), min, max (2 arguments) and
if(cond, a, b) where cond is `sum CMP sum` with CMP one of < <= > >= ==.
No implicit multiplication.  Map expressions see variables x, y; metric
expressions see px, py, qx, qy; both see config constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .dynamics import PLANE, PlanarMap, PlanarSystem, Region, rect
from .errors import EvalError, ParseError, ValidationFailure
from .geom import Point
from .lyapunov import SplitLyapunov, metric_axioms_check

MAP_VARS = ("x", "y")
METRIC_VARS = ("px", "py", "qx", "qy")
FUNCTIONS = {"abs": 1, "sqrt": 1, "exp": 1, "log": 1, "sign": 1, "min": 2, "max": 2}
CMP_OPS = ("<=", ">=", "==", "<", ">")


# ---------------------------------------------------------------------------
# syntax tree
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


@dataclass(frozen=True)
class Cmp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class If:
    cond: Cmp
    then: object
    other: object


# ---------------------------------------------------------------------------
# lexer
# ---------------------------------------------------------------------------

def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                m = j + 1
                if m < n and text[m] in "+-":
                    m += 1
                if m < n and text[m].isdigit():
                    j = m
                    while j < n and text[j].isdigit():
                        j += 1
            word = text[i:j]
            try:
                float(word)
            except ValueError:
                raise ParseError(i, "a number") from None
            tokens.append(("num", word, i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        two = text[i:i + 2]
        if two in ("<=", ">=", "=="):
            tokens.append(("op", two, i))
            i += 2
            continue
        if ch in "+-*/^(),<>":
            tokens.append(("op", ch, i))
            i += 1
            continue
        raise ParseError(i, "a token")
    tokens.append(("end", "", n))
    return tokens


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, text, at = self.peek()
        if kind != "op" or text != op:
            raise ParseError(at, f"'{op}'")
        return self.take()

    def parse_sum(self):
        node = self.parse_product()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in ("+", "-"):
                self.take()
                node = BinOp(text, node, self.parse_product())
            else:
                return node

    def parse_product(self):
        node = self.parse_unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in ("*", "/"):
                self.take()
                node = BinOp(text, node, self.parse_unary())
            else:
                return node

    def parse_unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.take()
            sign = 1
            kind, text, at = self.peek()
            if kind == "op" and text == "-":
                self.take()
                sign = -1
                kind, text, at = self.peek()
            if kind != "num":
                raise ParseError(at, "an integer exponent")
            value = float(text)
            if value != int(value) or not (-8 <= sign * value <= 8):
                raise ParseError(at, "an integer exponent in [-8, 8]")
            self.take()
            return Pow(base, sign * int(value))
        return base

    def parse_atom(self):
        kind, text, at = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            nkind, ntext, _ = self.peek()
            if nkind == "op" and ntext == "(":
                return self.parse_call(text, at)
            return Var(text)
        if kind == "op" and text == "(":
            node = self.parse_sum()
            self.expect_op(")")
            return node
        raise ParseError(at, "a number, name or '('")

    def parse_call(self, func: str, at: int):
        self.expect_op("(")
        if func == "if":
            cond = self.parse_comparison()
            self.expect_op(",")
            then = self.parse_sum()
            self.expect_op(",")
            other = self.parse_sum()
            self.expect_op(")")
            return If(cond, then, other)
        if func not in FUNCTIONS:
            raise ParseError(at, f"a known function (got '{func}')")
        args = [self.parse_sum()]
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text == ",":
                self.take()
                args.append(self.parse_sum())
            else:
                break
        self.expect_op(")")
        if len(args) != FUNCTIONS[func]:
            raise ParseError(at, f"{FUNCTIONS[func]} argument(s) to {func}")
        return Call(func, tuple(args))

    def parse_comparison(self):
        left = self.parse_sum()
        kind, text, at = self.peek()
        if kind != "op" or text not in CMP_OPS:
            raise ParseError(at, "a comparison operator")
        self.take()
        return Cmp(text, left, self.parse_sum())


def parse(text: str):
    """Parse an expression string into a syntax tree; consumes all input."""
    p = _Parser(text)
    node = p.parse_sum()
    kind, _, at = p.peek()
    if kind != "end":
        raise ParseError(at, "end of input")
    return node


# ---------------------------------------------------------------------------
# printing and evaluation
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def pprint(node) -> str:
    """Expression text that re-parses to a structurally identical tree."""
    return _pp(node, 0)


def _pp(node, parent_prec: int, right_side: bool = False) -> str:
    if isinstance(node, Num):
        return format(node.value, ".17g")
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = _pp(node.operand, 3)
        s = f"-{inner}"
        return f"({s})" if parent_prec > 3 else s
    if isinstance(node, BinOp):
        prec = _PREC[node.op]
        left = _pp(node.left, prec)
        right = _pp(node.right, prec + 1)  # left-assoc: parenthesize equal prec on the right
        s = f"{node.op.join((left, right))}" if False else f"{left}{node.op}{right}"
        return f"({s})" if prec < parent_prec else s
    if isinstance(node, Pow):
        base = _pp(node.base, 5)
        s = f"{base}^{node.exponent}"
        return f"({s})" if parent_prec > 4 else s
    if isinstance(node, Call):
        return f"{node.func}({','.join(_pp(a, 0) for a in node.args)})"
    if isinstance(node, If):
        cond = f"{_pp(node.cond.left, 0)}{node.cond.op}{_pp(node.cond.right, 0)}"
        return f"if({cond},{_pp(node.then, 0)},{_pp(node.other, 0)})"
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(node, env: dict) -> float:
    """IEEE double evaluation; `if` evaluates only the taken branch."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise EvalError("unbound-variable", node.name) from None
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, BinOp):
        a = evaluate(node.left, env)
        b = evaluate(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b == 0.0:
            raise EvalError("division-by-zero")
        return a / b
    if isinstance(node, Pow):
        base = evaluate(node.base, env)
        if node.exponent < 0 and base == 0.0:
            raise EvalError("division-by-zero", "zero base with negative exponent")
        try:
            return base ** node.exponent
        except OverflowError:
            return math.copysign(math.inf, base ** (node.exponent % 2 or 1))
    if isinstance(node, Call):
        args = [evaluate(a, env) for a in node.args]
        if node.func == "abs":
            return abs(args[0])
        if node.func == "sqrt":
            if args[0] < 0.0:
                raise EvalError("sqrt-negative", f"sqrt({args[0]:g})")
            return math.sqrt(args[0])
        if node.func == "exp":
            try:
                return math.exp(args[0])
            except OverflowError:
                return math.inf
        if node.func == "log":
            if args[0] <= 0.0:
                raise EvalError("log-nonpositive", f"log({args[0]:g})")
            return math.log(args[0])
        if node.func == "sign":
            return math.copysign(1.0, args[0]) if args[0] != 0.0 else 0.0
        if node.func == "min":
            return min(args)
        return max(args)
    if isinstance(node, If):
        c = node.cond
        a, b = evaluate(c.left, env), evaluate(c.right, env)
        taken = {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b, "==": a == b}[c.op]
        return evaluate(node.then if taken else node.other, env)
    raise TypeError(f"not an expression node: {node!r}")


def free_variables(node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Neg):
        return free_variables(node.operand)
    if isinstance(node, BinOp):
        return free_variables(node.left) | free_variables(node.right)
    if isinstance(node, Pow):
        return free_variables(node.base)
    if isinstance(node, Call):
        out = set()
        for a in node.args:
            out |= free_variables(a)
        return out
    if isinstance(node, If):
        return (free_variables(node.cond.left) | free_variables(node.cond.right)
                | free_variables(node.then) | free_variables(node.other))
    return set()


# ---------------------------------------------------------------------------
# system compilation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DslMetric:
    expr_px: object  # parsed metric expression over px, py, qx, qy
    constants: dict

    def eval(self, p: Point, q: Point) -> float:
        env = dict(self.constants)
        env.update(px=p.x, py=p.y, qx=q.x, qy=q.y)
        return evaluate(self.expr_px, env)


@dataclass(frozen=True)
class SystemConfig:
    fx: str
    fy: str
    inv_fx: str | None = None
    inv_fy: str | None = None
    metric: str | None = None
    constants: dict = field(default_factory=dict)
    fixed_point: tuple[float, float] = (0.0, 0.0)
    domain: Region = PLANE

    @staticmethod
    def from_dict(d: dict) -> "SystemConfig":
        domain = PLANE
        if "domain" in d:
            dom = d["domain"]
            if isinstance(dom, (list, tuple)):
                domain = rect(*dom)
            elif dom == "quadrant":
                from .dynamics import QUADRANT
                domain = QUADRANT
        return SystemConfig(
            fx=d["fx"], fy=d["fy"],
            inv_fx=d.get("inv_fx"), inv_fy=d.get("inv_fy"),
            metric=d.get("metric"),
            constants={k: float(v) for k, v in d.get("constants", {}).items()},
            fixed_point=tuple(d.get("fixed_point", (0.0, 0.0))),
            domain=domain,
        )


def _probe_grid(domain: Region, n: int = 5) -> list[Point]:
    if domain.kind == "rect":
        xmin, xmax, ymin, ymax = domain.bounds
    elif domain.kind in ("quadrant", "omega"):
        xmin, xmax, ymin, ymax = 0.0, 0.9, 0.0, 0.9
    else:
        xmin, xmax, ymin, ymax = -1.0, 1.0, -1.0, 1.0
    pts = []
    for i in range(n):
        for j in range(n):
            p = Point(xmin + (xmax - xmin) * i / (n - 1),
                      ymin + (ymax - ymin) * j / (n - 1))
            if domain.contains(p):
                pts.append(p)
    return pts


def compile_system(cfg: SystemConfig) -> PlanarSystem:
    """Build a PlanarSystem from parsed expressions, with a validation pass.

    Hard findings (unknown variables, fixed point not fixed, broken inverse
    round-trip, metric axiom violations) raise ValidationFailure listing all
    of them; informational notes are attached to the returned system.
    """
    fx, fy = parse(cfg.fx), parse(cfg.fy)
    inv = None
    if cfg.inv_fx is not None and cfg.inv_fy is not None:
        inv = (parse(cfg.inv_fx), parse(cfg.inv_fy))
    metric_expr = parse(cfg.metric) if cfg.metric is not None else None

    findings: list[str] = []
    notes: list[str] = []
    allowed_map = set(MAP_VARS) | set(cfg.constants)
    allowed_metric = set(METRIC_VARS) | set(cfg.constants)
    for label, node in (("fx", fx), ("fy", fy)) + (
            (("inv_fx", inv[0]), ("inv_fy", inv[1])) if inv else ()):
        extra = free_variables(node) - allowed_map
        if extra:
            findings.append(f"{label}: unknown variable(s) {sorted(extra)}")
    if metric_expr is not None:
        extra = free_variables(metric_expr) - allowed_metric
        if extra:
            findings.append(f"metric: unknown variable(s) {sorted(extra)}")
    if findings:
        raise ValidationFailure(findings)

    consts = dict(cfg.constants)

    def forward(p: Point) -> Point:
        env = dict(consts)
        env.update(x=p.x, y=p.y)
        return Point(evaluate(fx, env), evaluate(fy, env))

    inverse = None
    if inv is not None:
        inv_fx, inv_fy = inv

        def inverse(p: Point) -> Point:
            env = dict(consts)
            env.update(x=p.x, y=p.y)
            return Point(evaluate(inv_fx, env), evaluate(inv_fy, env))
    else:
        notes.append("no inverse supplied; backward iteration unavailable")

    if metric_expr is not None:
        metric = DslMetric(metric_expr, consts)
    else:
        metric = SplitLyapunov(2.0)
        notes.append("no metric supplied; using the split taxicab metric")

    fp = Point(*cfg.fixed_point)
    try:
        image = forward(fp)
        if max(abs(image.x - fp.x), abs(image.y - fp.y)) > 1e-9:
            findings.append(
                f"declared fixed point {fp.as_tuple()} maps to {image.as_tuple()}"
            )
    except EvalError as e:
        findings.append(f"map fails at the fixed point: {e}")

    probes = _probe_grid(cfg.domain)
    if inverse is not None:
        for p in probes:
            try:
                q = forward(p)
                back = inverse(q)
                if max(abs(back.x - p.x), abs(back.y - p.y)) > 1e-9:
                    findings.append(
                        f"inverse round-trip off by "
                        f"{max(abs(back.x - p.x), abs(back.y - p.y)):.3e} at {p.as_tuple()}"
                    )
                    break
            except EvalError:
                continue
    if metric_expr is not None:
        axioms = metric_axioms_check(metric, probes[:8])
        findings.extend(f"metric: {v}" for v in axioms.violations)

    if findings:
        raise ValidationFailure(findings)

    return PlanarSystem(
        name="dsl",
        map=PlanarMap(forward=forward, inverse=inverse, domain=cfg.domain),
        metric=metric,
        fixed_point=fp,
        chart=None,
        lam=None,
        notes=tuple(notes),
    )
