"""This module implements the curvature report produced by the Condition 1 verification."""
import dataclasses
from dataclasses import dataclass, field
from typing import Optional, Tuple


@dataclass(frozen=True)
class CurvatureReport:
    """The sampled bounds c1 <= |det H_{t.f}(x)| <= c2 and the localization constants derived from them."""
    condition1_holds: bool
    c1: float
    c2: float
    t_grid_density: int
    x_grid_density: int
    x_radius: float
    min_witness: Tuple[Tuple[float, ...], Tuple[float, ...]]
    max_witness: Tuple[Tuple[float, ...], Tuple[float, ...]]
    tolerance: float
    samples: int
    signature: Optional[int] = None
    signature_constant: Optional[bool] = None
    tau: Optional[float] = None
    kappa: Optional[float] = None
    rho: Optional[float] = None
    rho_prime: Optional[float] = None
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def localized(self):
        """Whether compute_localization filled tau, kappa, rho and rho_prime."""
        return self.tau is not None

    def with_localization(self, tau, kappa, rho, rho_prime):
        """Creates a copy holding the localization constants.

        Args:
            tau: The outer radius.
            kappa: The inner radius.
            rho: The gradient-image separation constant.
            rho_prime: The half distance between the box boundaries.

        Returns:
            The updated report.
        """
        if not 0 < kappa < tau:
            raise ValueError(f'Need 0 < kappa < tau, got kappa={kappa}, tau={tau}.')
        return dataclasses.replace(self, tau=tau, kappa=kappa, rho=rho, rho_prime=rho_prime)

    def to_dict(self):
        """Converts the report to a JSON-compatible mapping.

        Returns:
            The mapping.
        """
        data = dataclasses.asdict(self)
        data["min_witness"] = {"t": list(self.min_witness[0]), "x": list(self.min_witness[1])}
        data["max_witness"] = {"t": list(self.max_witness[0]), "x": list(self.max_witness[1])}
        data["notes"] = list(self.notes)
        return data
