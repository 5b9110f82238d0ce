"""Optimal rate region, feasibility gating and measured-vs-bound comparison."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional

from .params import INFEASIBLE_REASON, SystemParams, is_feasible


def fmt_rate(x: Optional[Fraction]) -> str:
    if x is None:
        return "-"
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class RateRegion:
    """Corner of the optimal region plus the two round-2 relay bounds.

    ``rx2_min`` is the per-user round-2 lower bound 1/(U0V0-T), which the
    scheme attains.  ``rx2_stated`` keeps the region's stated corner
    V0/(U0V0-T) so reports can show both readings side by side.
    """

    feasible: bool
    rx1_min: Optional[Fraction] = None
    ry1_min: Optional[Fraction] = None
    rx2_min: Optional[Fraction] = None
    rx2_stated: Optional[Fraction] = None
    ry2_lower: Optional[Fraction] = None
    ry2_upper: Optional[Fraction] = None
    reason: str = ""

    @property
    def tight(self) -> bool:
        return self.feasible and self.ry2_lower == self.ry2_upper

    def line(self) -> str:
        if not self.feasible:
            return f"feasible=false reason={self.reason!r}"
        return (f"feasible=true rx1_min={fmt_rate(self.rx1_min)} ry1_min={fmt_rate(self.ry1_min)} "
                f"rx2_min={fmt_rate(self.rx2_min)} rx2_stated={fmt_rate(self.rx2_stated)} "
                f"ry2_lower={fmt_rate(self.ry2_lower)} ry2_upper={fmt_rate(self.ry2_upper)} "
                f"tight={str(self.tight).lower()}")


def region_for(U0: int, V0: int, T: int) -> RateRegion:
    if not is_feasible(U0, V0, T):
        return RateRegion(False, reason=INFEASIBLE_REASON)
    one = Fraction(1)
    return RateRegion(
        True, one, one,
        rx2_min=Fraction(1, U0 * V0 - T),
        rx2_stated=Fraction(V0, U0 * V0 - T),
        ry2_lower=Fraction(1, U0 - T // V0),
        ry2_upper=Fraction(V0, U0 * V0 - T),
    )


def rate_region(params: SystemParams) -> RateRegion:
    return region_for(params.U0, params.V0, params.T)


@dataclass
class RateComparison:
    measured: tuple
    region: RateRegion
    checks: list = dc_field(default_factory=list)  # (name, measured, expected, ok)
    internal_errors: list = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.internal_errors and all(ok for *_, ok in self.checks)

    def lines(self) -> list[str]:
        out = [f"rate {name} measured={fmt_rate(m)} expected={fmt_rate(e)} "
               f"pass={str(ok).lower()}" for name, m, e, ok in self.checks]
        out += [f"internal-error {msg}" for msg in self.internal_errors]
        return out


def compare(measured, region: RateRegion) -> RateComparison:
    """Check a measured (Rx1, Ry1, Rx2, Ry2) against the scheme and the converse.

    The scheme should hit Rx1 = Ry1 = 1, Rx2 = 1/(U0V0-T) and Ry2 =
    ry2_upper exactly.  Anything strictly below a lower bound cannot come
    from a correct engine and is flagged as an internal error.
    """
    rx1, ry1, rx2, ry2 = (Fraction(x) for x in measured)
    rep = RateComparison((rx1, ry1, rx2, ry2), region)
    if not region.feasible:
        rep.internal_errors.append("rates measured for an infeasible parameter set")
        return rep
    for name, m, e in (("Rx1", rx1, region.rx1_min), ("Ry1", ry1, region.ry1_min),
                       ("Rx2", rx2, region.rx2_min), ("Ry2", ry2, region.ry2_upper)):
        rep.checks.append((name, m, e, m == e))
    for name, m, lo in (("Rx1", rx1, region.rx1_min), ("Ry1", ry1, region.ry1_min),
                        ("Rx2", rx2, region.rx2_min), ("Ry2", ry2, region.ry2_lower)):
        if m < lo:
            rep.internal_errors.append(
                f"{name}={fmt_rate(m)} below converse bound {fmt_rate(lo)}")
    return rep
