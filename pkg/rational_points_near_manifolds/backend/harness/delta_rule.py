"""This module implements the rules delta(Q) of experiment ladders: literals, Q^-a and Q^-a+eps."""
import logging
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from rational_points_near_manifolds.backend.funcspace.exact import as_fraction
from rational_points_near_manifolds.errors import ExperimentConfigError

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 0.05
MAX_DELTA = Fraction(1, 2)

_POWER_PATTERN = re.compile(r'^Q\s*\^\s*-\s*\(?\s*(?P<a>[0-9./]+)\s*\)?\s*(?:\+\s*(?P<eps>eps|[0-9.]+))?$')


class DeltaRuleKind(Enum):
    """An enum of the possible forms of delta rules."""
    LITERAL = 1  # A fixed delta
    POWER = 2  # delta = Q^(-a)
    POWER_EPSILON = 3  # delta = Q^(-a + eps)


def critical_exponent(n, R):
    """Gets a* = n/(n + 2(R-1)); the asymptotic holds for delta >= Q^(-a* + eps).

    Args:
        n: The manifold dimension.
        R: The codimension.

    Returns:
        The exact exponent.
    """
    return Fraction(n, n + 2 * (R - 1))


def conjecture_exponent(R):
    """Gets 1/R, the exponent of the conjectured range delta >= Q^(-1/R)."""
    return Fraction(1, R)


@dataclass(frozen=True)
class DeltaRule:
    """A rule mapping the denominator bound Q to the height threshold delta."""
    kind: DeltaRuleKind
    value: Optional[Fraction] = None
    exponent: Optional[Fraction] = None
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind == DeltaRuleKind.LITERAL:
            if self.value is None or not 0 <= self.value <= MAX_DELTA:
                raise ExperimentConfigError(f'Literal delta must lie in [0, 1/2], got {self.value}.')
        elif self.exponent is None or not 0 < self.exponent <= 1:
            raise ExperimentConfigError(f'Exponent a of Q^-a must lie in (0, 1], got {self.exponent}.')
        if self.kind == DeltaRuleKind.POWER_EPSILON and not 0 < self.epsilon < float(self.exponent):
            raise ExperimentConfigError(f'epsilon must lie in (0, a), got {self.epsilon}.')

    @classmethod
    def critical(cls, n, R, epsilon=DEFAULT_EPSILON):
        """Builds the rule delta = Q^(-n/(n + 2(R-1)) + epsilon)."""
        return cls(DeltaRuleKind.POWER_EPSILON, exponent=critical_exponent(n, R), epsilon=epsilon)

    def delta(self, Q):
        """Evaluates delta(Q), capped at 1/2.

        Args:
            Q: The denominator bound.

        Returns:
            The exact literal or the float power.
        """
        if self.kind == DeltaRuleKind.LITERAL:
            return self.value
        power = -float(self.exponent) + (self.epsilon if self.kind == DeltaRuleKind.POWER_EPSILON else 0.0)
        value = float(Q) ** power
        if value > MAX_DELTA:
            logger.warning(f'delta(Q={Q}) = {value:.6g} exceeds 1/2 and is capped.')
            return float(MAX_DELTA)
        return value

    def __str__(self):
        if self.kind == DeltaRuleKind.LITERAL:
            return str(self.value)
        text = f'Q^-{self.exponent}'
        return f'{text}+{self.epsilon:g}' if self.kind == DeltaRuleKind.POWER_EPSILON else text


def parse_delta_rule(text, epsilon=DEFAULT_EPSILON):
    """Parses a delta rule of the form "0.1", "1/4", "Q^-a", "Q^-a+eps" or "Q^-a+0.1".

    Args:
        text: The rule text (numbers are also accepted).
        epsilon: The value of "eps".

    Returns:
        The delta rule.
    """
    if not isinstance(text, str):
        text = repr(text) if isinstance(text, float) else str(text)
    stripped = text.strip()
    match = _POWER_PATTERN.match(stripped)
    try:
        if match is None:
            return DeltaRule(DeltaRuleKind.LITERAL, value=as_fraction(stripped))
        exponent = as_fraction(match.group("a"))
        eps = match.group("eps")
        if eps is None:
            return DeltaRule(DeltaRuleKind.POWER, exponent=exponent)
        return DeltaRule(DeltaRuleKind.POWER_EPSILON, exponent=exponent,
                         epsilon=epsilon if eps == "eps" else float(eps))
    except (ValueError, ZeroDivisionError) as exc:
        raise ExperimentConfigError(f'Cannot parse delta rule "{text}".') from exc
