"""Exception hierarchy shared by all zolab modules.

Every error carries a stable machine-readable ``code`` so the CLI can report
failures in a greppable form and map them to exit codes.
"""


class ZolabError(Exception):
    """Base class for all package errors."""

    code = "error"


class InputError(ZolabError):
    """Bad user input: malformed text, invalid values, mismatched sizes."""

    code = "input-error"


class ResourceError(ZolabError):
    """A configured cap refused the requested computation."""

    code = "resource-error"


class FormulaSyntaxError(InputError):
    code = "formula-syntax"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnboundVariable(InputError):
    code = "unbound-variable"


class UnassignedFreeVariable(InputError):
    code = "unassigned-free-variable"


class BallTooLarge(InputError):
    """Ball diameter 2r+1 exceeds the grid side, so it would wrap onto itself."""

    code = "ball-too-large"


class ImageTooSmall(InputError):
    """Grid too small for wrap-free ball matching (requires n >= 2r+2)."""

    code = "image-too-small"


class MalformedPBM(InputError):
    code = "malformed-pbm"


class NonSquare(InputError):
    code = "non-square"


class UnsupportedRate(InputError):
    code = "unsupported-rate"


class RadiusTooLarge(ResourceError):
    """Ball description enumeration would exceed the configured cell cap."""

    code = "radius-too-large"


class TooLargeToEnumerate(ResourceError):
    """Exhaustive image enumeration refused beyond the configured side cap."""

    code = "too-large-to-enumerate"


class WorkBudgetExceeded(ResourceError):
    """Brute-force evaluation exceeded the configured binding budget."""

    code = "work-budget-exceeded"
