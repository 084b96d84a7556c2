"""Exception types raised across flowlab.

Every numerical failure mode has its own class so that callers (and the CLI,
which maps them onto exit codes) can react precisely.
"""

from __future__ import annotations


class FlowlabError(Exception):
    """Base class for all flowlab errors."""


class PoleHit(FlowlabError):
    """A Mobius denominator vanished at the evaluation point."""


class NotClosedForm(FlowlabError):
    """No closed-form antiderivative exists in the expression catalog."""


class NonFinite(FlowlabError):
    """A NaN or infinity was produced where a finite value is required."""


class ZeroDenominator(FlowlabError):
    """|F'(z)| fell below the division cutoff."""


class DegenerateDilatation(FlowlabError):
    """|1 - |q|^2| fell below the degeneracy cutoff."""


class DepthExceeded(FlowlabError):
    """Adaptive quadrature hit its maximum refinement depth."""


class OutsideValidity(FlowlabError):
    """A family was queried at a time where its validity predicate fails."""


class MismatchedInitialPair(FlowlabError):
    """A linearly dependent family was given g0 that is not lambda * f0."""


class UnknownPreset(FlowlabError, KeyError):
    """The requested preset name does not exist."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return Exception.__str__(self)


class SensePreservationViolated(FlowlabError):
    """The Jacobian is not positive at some label."""

    def __init__(self, z: complex, jacobian: float):
        super().__init__(f"Jacobian {jacobian:.3e} <= 0 at label z = {z!r}")
        self.z = z
        self.jacobian = jacobian


class DegenerateBasis(FlowlabError):
    """The least-squares basis Gram matrix is numerically singular."""


class ManifestError(FlowlabError):
    """A JSON manifest failed validation; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
