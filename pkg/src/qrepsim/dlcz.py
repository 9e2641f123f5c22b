"""Physical-parameter derivation for atomic-ensemble repeater hardware.

Maps hardware quantities (span length, fiber loss, source and detection
efficiencies, detector type) onto the abstract chain probabilities used by
the analytics and the simulator: the generation probability p0, the
per-level connection probabilities, the vacuum-overlap coefficients c_i,
the optional terminal-projection efficiency, and the duration of one time
unit (one generation attempt over a fundamental segment).

Everything here is a pure function of its inputs; repeated calls agree
bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .params import ParameterError, Probability, TimeUnits

SPEED_OF_LIGHT_KM_PER_MS = 299.792458


class Detector(Enum):
    """Photon detection model: number-resolving or not (beta = 1 or 2)."""

    PNRD = 1
    NPRD = 2

    @property
    def beta(self) -> int:
        return self.value

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class PhysicalParams:
    """Hardware description of one repeater chain.

    Fields
    ------
    total_length_km : end-to-end distance L; segments are L / 2**levels.
    levels : doubling levels N.
    fiber_loss_db_per_km : attenuation; converted internally to nepers/km.
    eta0 : source excitation/collection probability per attempt.
    eta : combined retrieval and detection efficiency.
    detector : photon-counting model (PNRD beta=1, NPRD beta=2).
    refractive_index : sets the in-fiber signal speed c/refractive_index.
    """

    total_length_km: float
    levels: int
    fiber_loss_db_per_km: float
    eta0: Probability
    eta: Probability
    detector: Detector = Detector.NPRD
    refractive_index: float = 1.5

    def __post_init__(self) -> None:
        if not self.total_length_km > 0:
            raise ParameterError(
                f"total_length_km: must be positive, got {self.total_length_km!r}"
            )
        if not isinstance(self.levels, int) or self.levels < 1:
            raise ParameterError(
                f"levels: must be a positive integer, got {self.levels!r}"
            )
        if self.fiber_loss_db_per_km < 0:
            raise ParameterError(
                f"fiber_loss_db_per_km: must be non-negative, got "
                f"{self.fiber_loss_db_per_km!r}"
            )
        for name in ("eta0", "eta"):
            value = getattr(self, name)
            if math.isnan(value) or not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name}: probability must be in [0, 1], got {value!r}")
        if not isinstance(self.detector, Detector):
            raise ParameterError(f"detector: expected Detector, got {self.detector!r}")
        if self.refractive_index < 1.0:
            raise ParameterError(
                f"refractive_index: must be at least 1, got {self.refractive_index!r}"
            )

    @property
    def segment_length_km(self) -> float:
        return self.total_length_km / 2**self.levels

    @property
    def gamma_per_km(self) -> float:
        """Fiber attenuation in nepers per km."""
        return self.fiber_loss_db_per_km * math.log(10.0) / 10.0


@dataclass(frozen=True)
class DerivedProbabilities:
    """Chain probabilities and conversions produced by derive().

    c holds the vacuum-overlap coefficients c_0..c_N (c_0 = 0 with dark
    counts neglected). epsilon is the terminal-projection efficiency
    1/(c_N + 1); it applies to the number-resolving-free (NPRD) detection
    model only and is None for PNRD. fidelity_bound is the leading-order
    infidelity scale 2**N * (1 - eta0) of the distributed pair.
    """

    p0: Probability
    p_conn: tuple[Probability, ...]
    c: tuple[float, ...]
    epsilon: Probability | None
    fidelity_bound: float
    time_unit_ms: float


def derive(phys: PhysicalParams) -> DerivedProbabilities:
    """Evaluate the connection-probability recursion for the given hardware.

    p0 = eta0 * exp(-gamma * L0 / 2); then for i = 1..N with beta from the
    detector model:

        P_i = (eta / (c_{i-1} + 1)) * (1 - eta / (2 * beta * (c_{i-1} + 1)))
        c_i = 2 * c_{i-1} + 1 - eta / beta
    """
    beta = phys.detector.beta
    p0 = phys.eta0 * math.exp(-phys.gamma_per_km * phys.segment_length_km / 2.0)
    c = [0.0]
    p_conn = []
    for _ in range(phys.levels):
        prev = c[-1]
        p_conn.append((phys.eta / (prev + 1.0)) * (1.0 - phys.eta / (2.0 * beta * (prev + 1.0))))
        c.append(2.0 * prev + 1.0 - phys.eta / beta)
    epsilon = 1.0 / (c[-1] + 1.0) if phys.detector is Detector.NPRD else None
    fidelity_bound = 2**phys.levels * (1.0 - phys.eta0)
    time_unit_ms = phys.segment_length_km / (
        SPEED_OF_LIGHT_KM_PER_MS / phys.refractive_index
    )
    return DerivedProbabilities(
        p0=p0,
        p_conn=tuple(p_conn),
        c=tuple(c),
        epsilon=epsilon,
        fidelity_bound=fidelity_bound,
        time_unit_ms=time_unit_ms,
    )


def lifetime_to_units(tau_ms: float, derived: DerivedProbabilities) -> TimeUnits:
    """Convert a memory lifetime in milliseconds to whole time units (floor)."""
    if tau_ms < 0:
        raise ParameterError(f"tau_ms: must be non-negative, got {tau_ms!r}")
    return int(math.floor(tau_ms / derived.time_unit_ms))
