"""Exception hierarchy shared by all modules.

Every error raised deliberately by the library derives from :class:`K3Error`,
so callers (the CLI in particular) can separate mathematical/usage failures
from genuine bugs.
"""


class K3Error(Exception):
    """Base class for library errors."""


class VariableSetMismatch(K3Error, ValueError):
    def __init__(self, left=None, right=None):
        msg = "variable-set mismatch"
        if left is not None:
            msg += f": {tuple(left)} vs {tuple(right)}"
        super().__init__(msg)


class JetDivisionByZero(K3Error, ZeroDivisionError):
    def __init__(self):
        super().__init__("jet division by zero")


class DegenerateConfig(K3Error, ValueError):
    """Two marked points t_i coincide (or the configuration is malformed)."""

    def __init__(self, detail=""):
        msg = "degenerate t configuration"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class KernelPole(K3Error, ZeroDivisionError):
    """det A vanishes: the kernel has a pole at this configuration."""

    def __init__(self, msg="kernel pole"):
        super().__init__(msg)


class SingularMatrix(KernelPole):
    def __init__(self):
        super().__init__("singular A: kernel undefined at this point")


class NotPositiveDefinite(K3Error, ValueError):
    def __init__(self):
        super().__init__("Wick oracle requires positive-definite A")


class RegularizationError(K3Error, ValueError):
    """Raised for s on the pole set or a regularization depth that is too small."""


class UnconvergedError(K3Error, RuntimeError):
    def __init__(self, msg="unconverged, increase R"):
        super().__init__(msg)


class UsageError(K3Error, ValueError):
    """Malformed user input (config files, flags)."""
