"""zCDP budget arithmetic: composition, conversion to (eps, delta)-DP,
calibration, and the closed-form budget of every mechanism in the package.

All budgets here are closed forms; there is no numerical Renyi integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "ZcdpBudget",
    "DpBudget",
    "PrivacyParams",
    "compose",
    "zcdp_to_dp",
    "calibrate_rho",
    "MechanismSpec",
    "mechanism_budget",
]


@dataclass(frozen=True)
class ZcdpBudget:
    """Approximate-zCDP budget: rho plus an additive failure mass.

    ``delta_event`` is the probability mass outside the events on which the
    Renyi bound holds (0 for pure zCDP mechanisms).  ``saturated`` flags that
    a composition pushed delta_event past 1 and it was clamped.
    """

    rho: float
    delta_event: float = 0.0
    saturated: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be non-negative")
        if not 0.0 <= self.delta_event < 1.0 and not self.saturated:
            raise ValueError("delta_event must be in [0, 1)")


@dataclass(frozen=True)
class DpBudget:
    epsilon: float
    delta: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if not 0.0 <= self.delta < 1.0:
            raise ValueError("delta must be in [0, 1)")


@dataclass(frozen=True)
class PrivacyParams:
    """Noise scale plus the two delta knobs used by unknown-domain mechanisms.

    ``tau`` is the per-cell Gaussian scale in count units, ``delta`` the
    threshold mass per suppressed item, ``delta_prime`` the conversion slack.
    ``tau == 0`` is permitted only with ``noiseless=True`` (test mode).
    """

    tau: float
    delta: float = 1e-6
    delta_prime: float = 1e-6
    noiseless: bool = False

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be non-negative")
        if self.tau == 0 and not self.noiseless:
            raise ValueError("tau == 0 requires noiseless=True")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        if not 0.0 < self.delta_prime < 1.0:
            raise ValueError("delta_prime must be in (0, 1)")


def compose(budgets: list[ZcdpBudget]) -> ZcdpBudget:
    """Sequential composition: both budget fields add.

    delta_event saturates at 1 (with the ``saturated`` flag set) rather than
    raising, so a monitoring ledger never crashes mid-experiment.
    """
    if not budgets:
        raise ValueError("compose requires at least one budget")
    rho = math.fsum(b.rho for b in budgets)
    delta = math.fsum(b.delta_event for b in budgets)
    if delta >= 1.0:
        return ZcdpBudget(rho, 1.0 - 1e-16, saturated=True)
    return ZcdpBudget(rho, delta)


def zcdp_to_dp(budget: ZcdpBudget, delta_prime: float) -> DpBudget:
    """Convert rho-zCDP to (rho + 2*sqrt(rho*ln(1/delta')), delta')-DP.

    The approximate-zCDP mass adds to the output delta.
    """
    if not 0.0 < delta_prime < 1.0:
        raise ValueError("delta_prime must be in (0, 1)")
    eps = budget.rho + 2.0 * math.sqrt(budget.rho * math.log(1.0 / delta_prime))
    return DpBudget(eps, min(budget.delta_event + delta_prime, 1.0 - 1e-16))


def calibrate_rho(target: DpBudget, delta_prime: float) -> float:
    """Largest rho whose conversion at delta_prime meets target.epsilon.

    The conversion is a quadratic in sqrt(rho), so the inverse is exact:
    rho = (sqrt(ln(1/delta') + eps) - sqrt(ln(1/delta')))^2.
    """
    if target.epsilon <= 0:
        raise ValueError("target epsilon must be positive")
    if not 0.0 < delta_prime <= target.delta:
        raise ValueError("delta_prime must be in (0, target.delta]")
    log_term = math.log(1.0 / delta_prime)
    return (math.sqrt(log_term + target.epsilon) - math.sqrt(log_term)) ** 2


@dataclass(frozen=True)
class MechanismSpec:
    """Descriptor naming a mechanism and the parameters its budget needs.

    Kinds: bin-mech, known-base, known-gauss, known-gumbel, sparse-gumb,
    unk-gauss, unk-gumbel, unk-base, meta-kr, meta-ku, meta-ur, meta-uu.
    """

    kind: str
    delta0: int | None = None
    k: int | None = None
    k_bar: int | None = None
    switches: int | None = None


def _require(spec: MechanismSpec, name: str):
    value = getattr(spec, name)
    if value is None:
        raise ValueError(f"mechanism {spec.kind!r} requires parameter {name!r}")
    return value


def mechanism_budget(spec: MechanismSpec, params: PrivacyParams) -> ZcdpBudget:
    """Closed-form approximate-zCDP budget of a mechanism configuration.

    Unknown-domain mechanisms carry their threshold mass in ``delta_event``;
    converting with ``zcdp_to_dp`` then yields the full (eps, delta) claim.
    """
    tau = params.tau
    if tau == 0:
        raise ValueError("budget undefined for noiseless mode (tau == 0)")
    kind = spec.kind
    if kind == "bin-mech":
        return ZcdpBudget(1.0 / (2.0 * tau * tau))
    if kind in ("known-base", "meta-kr"):
        d0 = _require(spec, "delta0")
        return ZcdpBudget(d0 / (2.0 * tau * tau))
    if kind == "known-gauss":
        d0 = _require(spec, "delta0")
        return ZcdpBudget(d0 / (2.0 * tau * tau))
    if kind in ("known-gumbel", "meta-ku"):
        k = _require(spec, "k")
        return ZcdpBudget(k / (tau * tau))
    if kind == "sparse-gumb":
        k = _require(spec, "k")
        return ZcdpBudget((2.0 * k + 4.0) / (2.0 * tau * tau))
    if kind in ("unk-gauss", "unk-base", "meta-ur"):
        d0 = _require(spec, "delta0")
        return ZcdpBudget(d0 / (2.0 * tau * tau), d0 * params.delta)
    if kind == "meta-uu":
        k = _require(spec, "k")
        return ZcdpBudget(k / (tau * tau), 2.0 * k * params.delta)
    if kind == "unk-gumbel":
        k = _require(spec, "k")
        k_bar = _require(spec, "k_bar")
        return ZcdpBudget(k / (tau * tau), k_bar * params.delta)
    raise ValueError(f"unknown mechanism kind: {kind!r}")
