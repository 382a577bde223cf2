"""
This module defines the exceptions raised across wander_atlas. Every error \
carries the process exit code the command line maps it to, so that batch \
harnesses can assert on behaviour without parsing messages.
"""


class WanderAtlasError(Exception):
    """Base class of every error raised by wander_atlas."""

    exit_code = 1


class InfeasibleSpec(WanderAtlasError):
    """
    Raised when a MapSpec cannot be realized as a component of strict wandering.

    Args:
        rule (str): Short name of the violated rule, e.g. \
            "infinitely-many-singular-points".
        message (str): Human readable diagnostic.
    """

    exit_code = 2

    def __init__(self, rule: str, message: str):
        self.rule = rule
        super().__init__(f"[{rule}] {message}")


class AddressError(WanderAtlasError):
    """Raised when a singular event addresses an atom that is never built."""


class TransportViolation(WanderAtlasError):
    """
    Raised by classify_types when an atom breaks a boundary-type transport rule.

    Args:
        pairs (list): (atom id, image atom id, reason) triples.
    """

    def __init__(self, pairs: list):
        self.pairs = pairs
        text = "; ".join(f"atom {a} -> {b}: {why}" for a, b, why in pairs)
        super().__init__(f"type transport violated: {text}")


class RoleContradiction(WanderAtlasError):
    """Raised when the main/auxiliary role calculus does not hold."""


class NotAChain(WanderAtlasError):
    """Raised when an atom sequence is not a chain."""


class CycleDetected(WanderAtlasError):
    """Raised when a gluing graph contains a cycle."""


class Unclassifiable(WanderAtlasError):
    """Raised when a graph is too shallow to certify its end space."""

    exit_code = 3


class NonEscaping(WanderAtlasError):
    """Raised when an orbit stays bounded for max_iter steps."""

    exit_code = 4

    def __init__(self, z: complex, max_iter: int = 0):
        self.z = z
        super().__init__(f"orbit of {z} did not escape in {max_iter} iterations")


class AmbiguousRegion(WanderAtlasError):
    """Raised when a region's image straddles two candidate atoms."""


class SpecFormatError(WanderAtlasError):
    """Raised when a spec file cannot be parsed into a MapSpec."""


class GraphFormatError(WanderAtlasError):
    """Raised when a graph file does not match the AtomGraph schema."""


class ResolutionWarning(UserWarning):
    """Emitted (or raised under escalation) when the grid is too coarse."""
