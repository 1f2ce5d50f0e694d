"""The gap inequality and the feasibility boundary in kappa.

A gap certificate at parameters (u, v, kappa) is the strict inequality
A > (kappa/pi)^2 * { (v/2 - u)^2 A + (v - 2u)(B + D + E) + C + F + G
                     + 2H + 2I + 2J },
all coefficients evaluated at (kappa, u).  When it holds, the zeta
function has a zero-free subinterval of length 2*kappa/log T inside
[T, 2T] for large T, i.e. kappa/pi average spacings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .closed_forms import eval_coefficient, eval_scale

__all__ = [
    "U_MAX_STRICT",
    "GapParams",
    "GapVerdict",
    "InfeasibleParametersError",
    "bracket",
    "phi",
    "check",
    "sup_kappa",
]

# The amplifier-length range with a proven moment theorem behind it; the
# extended regime up to 1 is speculative and must be opted into.
U_MAX_STRICT = 1.0 / 11.0


class InfeasibleParametersError(ValueError):
    """No kappa in the scan range satisfies the inequality."""


@dataclass(frozen=True)
class GapParams:
    """Admissible (u, v, kappa) triple for the gap inequality."""

    u: float
    v: float
    kappa: float
    extended_u: bool = False

    def __post_init__(self):
        u_max = 1.0 if self.extended_u else U_MAX_STRICT
        if not 0.0 < self.u < u_max:
            raise ValueError(
                f"u = {self.u} outside (0, {u_max})"
                + ("" if self.extended_u else "; pass extended_u to go beyond"))
        if self.v <= 0.0:
            raise ValueError(f"v must be positive, got {self.v}")
        if self.kappa <= 0.0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")


@dataclass(frozen=True)
class GapVerdict:
    """Outcome of one inequality check."""

    holds: bool
    lhs: float            # A at (kappa, u)
    rhs: float            # the full right-hand side
    margin: float         # lhs - rhs
    gap_multiplier: float  # kappa / pi, the gap in average spacings


def bracket(u: float, v: float, kappa: float,
            precision_dps: int | None = None) -> float:
    """The curly-brace combination of the ten coefficients."""
    val = {label: eval_coefficient(label, kappa, u, precision_dps)
           for label in "ABCDEFGHIJ"}
    w1 = (v / 2.0 - u)
    w2 = (v - 2.0 * u)
    return (w1 * w1 * val["A"]
            + w2 * (val["B"] + val["D"] + val["E"])
            + val["C"] + val["F"] + val["G"]
            + 2.0 * (val["H"] + val["I"] + val["J"]))


def phi(params: GapParams, precision_dps: int | None = None) -> float:
    """Right-hand side (kappa/pi)^2 times the coefficient bracket."""
    pi = math.pi
    if precision_dps is not None:
        import mpmath as mp

        pi = +mp.pi  # evaluated at the ambient working precision
    scale = (params.kappa / pi) ** 2
    return scale * bracket(params.u, params.v, params.kappa, precision_dps)


# double-precision margins closer to zero than this multiple of the
# summed term magnitudes are treated as undecided and re-evaluated
_NOISE_FACTOR = 1e-13
_ESCALATION_DPS = (40, 100)


def _margin_noise_floor(params: GapParams) -> float:
    scale = eval_scale("A", params.kappa, params.u)
    bracket_scale = sum(
        eval_scale(label, params.kappa, params.u) for label in LABEL_WEIGHT_ORDER)
    return _NOISE_FACTOR * (scale + (params.kappa / math.pi) ** 2 * bracket_scale)


LABEL_WEIGHT_ORDER = "ABCDEFGHIJ"


def check(params: GapParams, precision_dps: int | None = None,
          auto_precision: bool = True) -> GapVerdict:
    """Evaluate the inequality strictly; margin > 0 means it holds.

    In double precision the two sides cancel heavily for small u, so when
    the margin lands inside the estimated rounding floor the verdict is
    re-derived at increasing working precision instead of reporting sign
    noise.  Pass precision_dps to force one evaluation precision.
    """
    if precision_dps is not None:
        import mpmath as mp

        with mp.workdps(precision_dps):
            lhs = eval_coefficient("A", params.kappa, params.u, precision_dps)
            rhs = phi(params, precision_dps)
            margin = lhs - rhs
        return GapVerdict(margin > 0, float(lhs), float(rhs), float(margin),
                          params.kappa / math.pi)
    lhs = eval_coefficient("A", params.kappa, params.u)
    rhs = phi(params)
    margin = lhs - rhs
    if auto_precision and abs(margin) <= _margin_noise_floor(params):
        for dps in _ESCALATION_DPS:
            verdict = check(params, precision_dps=dps)
            import mpmath as mp

            floor = float(
                (eval_scale("A", params.kappa, params.u)
                 + (params.kappa / math.pi) ** 2
                 * sum(eval_scale(lb, params.kappa, params.u)
                       for lb in LABEL_WEIGHT_ORDER))
                * mp.mpf(10) ** (5 - dps))
            if abs(verdict.margin) > floor:
                return verdict
        return verdict
    return GapVerdict(margin > 0, float(lhs), float(rhs), float(margin),
                      params.kappa / math.pi)


def sup_kappa(u: float, v: float, extended_u: bool = False,
              tol: float = 1e-6,
              scan: tuple[float, float, float] = (0.5, 20.0, 0.25)) -> float:
    """Largest kappa (to tol) below which the inequality still holds.

    Scans [scan_lo, scan_hi] at the given step, takes the last holding
    scan point, and bisects against the next (failing) one.  Raises if no
    scan point is feasible; a feasible top of range means the scan window
    is too small, which is also an error rather than a silent clamp.
    """
    lo, hi, step = scan
    holds = lambda k: check(GapParams(u, v, k, extended_u)).holds
    kappas = []
    k = lo
    while k <= hi + 1e-12:
        kappas.append(k)
        k += step
    feasible = [k for k in kappas if holds(k)]
    if not feasible:
        raise InfeasibleParametersError(
            f"inequality fails for every kappa in [{lo}, {hi}] at (u={u}, v={v})")
    last = max(feasible)
    if last >= kappas[-1] - 1e-12:
        raise InfeasibleParametersError(
            f"inequality still holds at kappa = {last}; enlarge the scan range")
    fail = last + step
    while fail - last > tol:
        mid = 0.5 * (last + fail)
        if holds(mid):
            last = mid
        else:
            fail = mid
    return last
