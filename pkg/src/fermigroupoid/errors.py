"""Exception types shared across modules."""


class WindowError(ValueError):
    """Raised when an operation needs points beyond the sampled window."""

    def __init__(self, detail: str = ""):
        super().__init__("window exhausted" + (f": {detail}" if detail else ""))


class EmptySetError(ValueError):
    def __init__(self) -> None:
        super().__init__("empty set")


class CoverNeighborhoodError(ValueError):
    def __init__(self, detail: str = ""):
        super().__init__("not a cover neighborhood" + (f": {detail}" if detail else ""))


class CompositionError(ValueError):
    def __init__(self, detail: str = ""):
        super().__init__("source/range mismatch" + (f": {detail}" if detail else ""))


class OracleLimitError(ValueError):
    def __init__(self, n_sites: int, limit: int):
        super().__init__(f"oracle limit: {n_sites} sites exceeds {limit}")


class NotPerturbedPeriodicError(ValueError):
    def __init__(self, detail: str = ""):
        super().__init__("not perturbed periodic" + (f": {detail}" if detail else ""))
