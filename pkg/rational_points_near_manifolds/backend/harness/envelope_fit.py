"""This module fits the error envelope of the asymptotic |N_w - (2 delta)^R N0| over experiment ladders.

The error is normalized by the power part of the envelope,

    delta^((R-1)(n-2)/n) Q^n                    if delta >= Q^(-n/(n + 2(R-1))),
    Q^(n - (n-2)(R-1)/(n + 2(R-1)))            otherwise,

and the residual is fitted against A exp(c sqrt(log Q)) (n = 2) or A (log Q)^c (n >= 3) by least squares in
log space.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from rational_points_near_manifolds.backend.harness.delta_rule import critical_exponent
from rational_points_near_manifolds.backend.harness.run_record import RunRecord, RunRow
from rational_points_near_manifolds.errors import DegenerateFitError

logger = logging.getLogger(__name__)

MIN_RUNGS = 4
MAX_ENVELOPE_SPREAD = 10.0


def envelope_delta_exponent(n, R):
    """Gets the exponent (R-1)(n-2)/n of delta in the envelope."""
    return (R - 1) * (n - 2) / n


def envelope_scale(n, R, Q, delta):
    """Gets the power part of the envelope at (Q, delta).

    Args:
        n: The manifold dimension.
        R: The codimension.
        Q: The denominator bound.
        delta: The height threshold.

    Returns:
        The scale.
    """
    critical = float(critical_exponent(n, R))
    if delta >= Q ** -critical:
        return float(delta) ** envelope_delta_exponent(n, R) * float(Q) ** n
    return float(Q) ** (n - (n - 2) * (R - 1) / (n + 2 * (R - 1)))


def envelope_growth(n, Q):
    """Gets the variable g(Q) of E_n(Q) = exp(c g(Q)): sqrt(log Q) for n = 2, log log Q for n >= 3."""
    log_q = math.log(Q)
    return math.sqrt(log_q) if n == 2 else math.log(log_q)


@dataclass(frozen=True)
class EnvelopeFit:
    """The fitted envelope A E_n(Q) of the normalized errors and its ratio spread over the ladder."""
    n: int
    R: int
    form: str
    amplitude: float
    exponent: float
    residuals: tuple
    envelope_ratios: tuple
    spread: float
    bounded: bool

    def to_dict(self):
        return {
            "n": self.n, "R": self.R, "form": self.form, "amplitude": self.amplitude, "exponent": self.exponent,
            "residuals": list(self.residuals), "envelope_ratios": list(self.envelope_ratios),
            "spread": self.spread, "bounded": self.bounded,
        }


def fit_error_envelope(record, max_spread=MAX_ENVELOPE_SPREAD):
    """Fits the normalized errors |count - main term| / scale of a run record against E_n(Q).

    Args:
        record: The run record (at least 4 rungs, Q > e).
        max_spread: The bound on max/min of the envelope ratios.

    Returns:
        The envelope fit.
    """
    rows = [row for row in record.rows if row.Q > math.e]
    if len(rows) < MIN_RUNGS:
        raise DegenerateFitError(f'Envelope fits need at least {MIN_RUNGS} rungs with Q > e, got {len(rows)}.')
    n, R = record.n, record.R
    residuals = [abs(float(row.count) - row.main_term) / envelope_scale(n, R, row.Q, row.delta) for row in rows]
    points = [(envelope_growth(n, row.Q), math.log(r)) for row, r in zip(rows, residuals) if r > 0]
    if len(points) < 2:
        raise DegenerateFitError("Errors vanish on the ladder; there is no envelope to fit.")
    growth, log_residual = np.array(points).T
    if np.ptp(growth) == 0:
        raise DegenerateFitError("The ladder has a single distinct Q.")
    exponent, log_amplitude = np.polyfit(growth, log_residual, 1)
    amplitude = math.exp(log_amplitude)
    ratios = np.exp(log_residual - (log_amplitude + exponent * growth))
    spread = float(np.max(ratios) / np.min(ratios))
    fit = EnvelopeFit(n=n, R=R, form="exp_sqrt_log" if n == 2 else "log_power", amplitude=amplitude,
                      exponent=float(exponent), residuals=tuple(residuals), envelope_ratios=tuple(ratios.tolist()),
                      spread=spread, bounded=spread <= max_spread)
    logger.info(f'Envelope fit: amplitude {amplitude:.4g}, exponent {exponent:.4g}, ratio spread {spread:.3g}.')
    return fit


def synthetic_envelope_record(n, R, q_list, delta_rule, amplitude, exponent, density=0.25):
    """Generates a record whose errors lie exactly on A E_n(Q) times the envelope scale.

    Args:
        n: The manifold dimension.
        R: The codimension.
        q_list: The ladder.
        delta_rule: The delta rule.
        amplitude: The injected amplitude A.
        exponent: The injected exponent c.
        density: The constant sigma with N0 = sigma Q^(n+1).

    Returns:
        The run record.
    """
    rows = []
    for Q in q_list:
        delta = float(delta_rule.delta(Q))
        base = density * Q ** (n + 1)
        main_term = (2 * delta) ** R * base
        error = amplitude * math.exp(exponent * envelope_growth(n, Q)) * envelope_scale(n, R, Q, delta)
        count = main_term + error
        rows.append(RunRow(Q=Q, delta=delta, count=count, N0=base, main_term=main_term, ratio=count / main_term))
    return RunRecord(config={"name": "synthetic", "delta_rule": str(delta_rule)}, n=n, R=R, rows=tuple(rows),
                     extras={"amplitude": amplitude, "exponent": exponent})
