"""Typed errors raised across the package.

Errors render as ``Name(arg, ...)`` so CLI messages name the failure directly,
e.g. ``IsolatedNode(2)``.
"""


class TreeSamplerError(Exception):
    """Base class. Subclasses pass their identifying arguments to ``__init__``."""

    def __init__(self, *args, detail: str | None = None):
        super().__init__(*args)
        self.detail = detail

    def __str__(self) -> str:
        inner = ", ".join(repr(a) if isinstance(a, str) else str(a) for a in self.args)
        text = f"{type(self).__name__}({inner})"
        if self.detail:
            text += f": {self.detail}"
        return text


# --- invalid input graphs (CLI exit 2) ---------------------------------------


class GraphError(TreeSamplerError):
    pass


class GraphFormatError(GraphError):
    pass


class NegativeWeight(GraphError):
    def __init__(self, i: int, j: int):
        super().__init__(i, j)
        self.i, self.j = i, j


class EdgeIntoRoot(GraphError):
    def __init__(self, i: int):
        super().__init__(i)
        self.i = i


class SelfLoop(GraphError):
    def __init__(self, i: int):
        super().__init__(i)
        self.i = i


class IsolatedNode(GraphError):
    def __init__(self, j: int):
        super().__init__(j)
        self.j = j


class ParentOutOfRange(GraphError):
    def __init__(self, node: int, parent: int):
        super().__init__(node, parent)
        self.node, self.parent = node, parent


# --- domain outcomes (CLI exit 3) --------------------------------------------


class DomainError(TreeSamplerError):
    pass


class NonSquare(DomainError):
    pass


class Singular(DomainError):
    """The matrix (or Laplacian) is singular: no tree of the requested kind exists."""

    def __init__(self, *args, detail: str | None = None):
        super().__init__(*args, detail=detail)
        self.z = 0.0


class SingularUpdate(DomainError):
    pass


class DegenerateColumn(DomainError):
    def __init__(self, j: int, detail: str | None = None):
        super().__init__(j, detail=detail)
        self.j = j


class Unreachable(DomainError):
    def __init__(self, j: int):
        super().__init__(j)
        self.j = j


class NoRootEdge(DomainError):
    pass


class RetryCapExceeded(DomainError):
    def __init__(self, cap: int):
        super().__init__(cap)
        self.cap = cap


class TooLarge(DomainError):
    def __init__(self, n: int, cap: int):
        super().__init__(n, detail=f"enumeration cap is {cap}")
        self.n, self.cap = n, cap


class EmptySupport(DomainError):
    pass


class SupportExhausted(DomainError):
    def __init__(self, count_returned: int, detail: str | None = None):
        super().__init__(count_returned, detail=detail)
        self.count_returned = count_returned


class ForeignTree(DomainError):
    """A sampler emitted a tree outside the exact support."""

    def __init__(self, key):
        super().__init__(list(key))
        self.key = key
