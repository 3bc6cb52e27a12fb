"""Exception hierarchy shared across the toolkit.

Every error raised on purpose derives from ExplabError so the CLI can map
"analysis failed" (exit 1) apart from usage errors (exit 2).
"""


class ExplabError(Exception):
    pass


# -- geometry ---------------------------------------------------------------

class MalformedPolyline(ExplabError):
    pass


# -- maps, regions, charts ---------------------------------------------------

class OutOfDomain(ExplabError):
    def __init__(self, message, point=None, n=None):
        super().__init__(message)
        self.point = point
        self.n = n


class MissingChart(ExplabError):
    pass


class MissingInverse(ExplabError):
    pass


class ChartMismatch(ExplabError):
    pass


class NoIntersection(ExplabError):
    pass


class NotOnAxis(ExplabError):
    pass


# -- parameters --------------------------------------------------------------

class BadLambda(ExplabError):
    pass


class BadParameter(ExplabError):
    pass


class InvalidRadius(ExplabError):
    pass


class EmptyRadii(ExplabError):
    pass


class BadDelta(ExplabError):
    pass


class BadK(ExplabError):
    pass


class NonPositiveK(ExplabError):
    pass


# -- numerics ----------------------------------------------------------------

class RootNotBracketed(ExplabError):
    pass


class BisectionFailure(ExplabError):
    pass


class IdenticalPoints(ExplabError):
    pass


class Degenerate(ExplabError):
    pass


class WitnessNotFound(ExplabError):
    """No separating iterate found within the scanned range."""

    def __init__(self, n_max):
        super().__init__(f"no witness within |n| <= {n_max}")
        self.n_max = n_max


# -- expression language -----------------------------------------------------

class ParseError(ExplabError):
    def __init__(self, offset, expected):
        super().__init__(f"parse error at offset {offset}: expected {expected}")
        self.offset = offset
        self.expected = expected


class EvalError(ExplabError):
    KINDS = ("division-by-zero", "log-nonpositive", "sqrt-negative", "unbound-variable")

    def __init__(self, kind, detail=""):
        super().__init__(f"{kind}{': ' + detail if detail else ''}")
        self.kind = kind


class ValidationFailure(ExplabError):
    def __init__(self, findings):
        super().__init__("; ".join(findings))
        self.findings = tuple(findings)
