"""Steady state of the driven Kerr magnon mode.

The mean-field amplitude of the driven mode obeys a cubic fixed-point
equation in the Kerr shift kappa = K <m>^2 (treated real).  Above a
critical drive the cubic has three real roots over a detuning window
(bistability); the middle root is dynamically unstable.  Each stable
amplitude defines a squeezing parameter r through the ratio of the
effective detuning and the two-magnon coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq


class NoCriticalPointError(ValueError):
    """The Kerr coefficient vanishes: no bistability threshold exists."""


class NoBistableWindowError(ValueError):
    """Drive below the critical amplitude: no three-root window."""


class SqueezingInvalidError(ValueError):
    """(Delta_m + kappa)/(Delta_m - kappa) <= 0: squeezing parameter undefined."""


@dataclass(frozen=True)
class SteadyParams:
    """Drive-frame parameters of the magnon mode (all rad/s)."""

    delta_m: float
    gamma_m: float
    kerr_K: float
    drive_amp: float

    def __post_init__(self):
        if self.gamma_m < 0:
            raise ValueError("gamma_m must be >= 0")
        if self.drive_amp < 0:
            raise ValueError("drive_amp must be >= 0")


@dataclass(frozen=True)
class SteadyStateBranch:
    """One real root of the steady-state cubic with derived quantities."""

    kappa: float
    stable: bool
    squeezing_r: float | None
    effective_detuning: float


class CriticalPoint(NamedTuple):
    omega_c: float
    delta_c: float
    kappa_c: float


class SwitchingPoint(NamedTuple):
    delta_m: float
    kappa: float


def cubic_coefficients(p: SteadyParams) -> tuple[float, float, float]:
    """(C2, C1, C0) of kappa^3 + C2 kappa^2 + C1 kappa + C0 = 0."""
    c2 = -2.0 * p.delta_m
    c1 = p.delta_m ** 2 + p.gamma_m ** 2 / 4.0
    c0 = -p.kerr_K * p.drive_amp ** 2
    return c2, c1, c0


def effective_detuning(kappa: float, delta_m: float) -> float:
    """Kerr-shifted magnon detuning Delta_m = delta_m - 2 kappa."""
    return delta_m - 2.0 * kappa


def squeezing_parameter(kappa: float, delta_m: float) -> float:
    """r = (1/4) ln[(Delta_m + kappa) / (Delta_m - kappa)].

    Requires |Delta_m| > |kappa| (log argument positive); otherwise the
    two-magnon term cannot be rotated away and SqueezingInvalidError is
    raised (physically: beyond-threshold region).
    """
    delta_eff = effective_detuning(kappa, delta_m)
    denom = delta_eff - kappa
    if denom == 0.0:
        raise SqueezingInvalidError("Delta_m == kappa: squeezing diverges")
    ratio = (delta_eff + kappa) / denom
    if ratio <= 0.0:
        raise SqueezingInvalidError(
            f"log argument {ratio:.3e} <= 0 for kappa={kappa}, delta_m={delta_m}")
    return 0.25 * math.log(ratio)


def _branch_is_stable(kappa: float, delta_m: float, gamma_m: float) -> bool:
    # Drift matrix of the linearized fluctuations has eigenvalues
    # -gamma/2 +- sqrt(kappa^2 - Delta_m^2); unstable iff the positive
    # root exceeds gamma/2.
    delta_eff = effective_detuning(kappa, delta_m)
    return kappa ** 2 - delta_eff ** 2 <= gamma_m ** 2 / 4.0


def solve_kappa(p: SteadyParams) -> list[SteadyStateBranch]:
    """All real roots of the steady-state cubic, sorted ascending.

    Roots come from the companion matrix (np.roots) followed by one
    Newton polish; near-real eigenpairs are accepted as real when the
    imaginary part is below 1e-8 * max(1, |root|).
    """
    c2, c1, c0 = cubic_coefficients(p)
    roots = np.roots([1.0, c2, c1, c0])
    real_roots = []
    for z in roots:
        if abs(z.imag) >= 1e-8 * max(1.0, abs(z)):
            continue
        x = float(z.real)
        for _ in range(3):
            f = ((x + c2) * x + c1) * x + c0
            df = (3.0 * x + 2.0 * c2) * x + c1
            if df == 0.0:
                break
            step = f / df
            x -= step
            if abs(step) < 1e-15 * max(1.0, abs(x)):
                break
        real_roots.append(x)
    real_roots.sort()
    # collapse numerically duplicated roots (double root at tangency)
    branches = []
    for x in real_roots:
        if branches and abs(x - branches[-1]) < 1e-10 * max(1.0, abs(x)):
            continue
        try:
            r = squeezing_parameter(x, p.delta_m)
        except SqueezingInvalidError:
            r = None
        branches.append(SteadyStateBranch(
            kappa=x,
            stable=_branch_is_stable(x, p.delta_m, p.gamma_m),
            squeezing_r=r,
            effective_detuning=effective_detuning(x, p.delta_m),
        ))
    return branches


def critical_drive(gamma_m: float, kerr_K: float) -> CriticalPoint:
    """Critical drive amplitude and the tangency point of the cubic.

    For kerr_K > 0:  omega_c = sqrt(sqrt(3) gamma^3 / (9 K)),
    delta_c = sqrt(3) gamma / 2, kappa_c = sqrt(3) gamma / 3.  The
    kerr_K < 0 case is the mirror image (delta_c, kappa_c change sign,
    |K| enters the amplitude).
    """
    if kerr_K == 0.0:
        raise NoCriticalPointError("kerr_K = 0: the cubic degenerates, no critical point")
    omega_c = math.sqrt(math.sqrt(3.0) * gamma_m ** 3 / (9.0 * abs(kerr_K)))
    sign = 1.0 if kerr_K > 0 else -1.0
    return CriticalPoint(omega_c,
                         sign * math.sqrt(3.0) / 2.0 * gamma_m,
                         sign * math.sqrt(3.0) / 3.0 * gamma_m)


def switching_points(p: SteadyParams) -> tuple[SwitchingPoint, SwitchingPoint]:
    """Bistable-window endpoints P_minus, P_plus (by increasing delta_m).

    At a switching point the cubic has a double root: F = 0 and
    dF/dkappa = 0 hold jointly.  Eliminating delta_m parametrizes both
    conditions by kappa: delta = 2 kappa -+ s with s = sqrt(kappa^2 -
    gamma^2/4), and K Omega^2 = 2 kappa^2 (kappa -+ s).  Each sign
    branch is monotone on a known bracket, so the roots come from
    bisection (brentq) without cancellation issues.
    """
    if p.kerr_K == 0.0:
        raise NoCriticalPointError("kerr_K = 0: no bistability")
    mirror = p.kerr_K < 0
    gamma = p.gamma_m
    w = abs(p.kerr_K) * p.drive_amp ** 2
    crit = critical_drive(gamma, abs(p.kerr_K))
    w_crit = abs(p.kerr_K) * crit.omega_c ** 2
    if p.drive_amp < crit.omega_c * (1.0 - 1e-12):
        raise NoBistableWindowError(
            f"drive_amp {p.drive_amp:.6e} <= critical {crit.omega_c:.6e}")

    def s_of(k):
        return math.sqrt(max(k * k - gamma * gamma / 4.0, 0.0))

    def w_minus(k):   # delta = 2k - s branch
        return 2.0 * k * k * (k - s_of(k)) - w

    def w_plus(k):    # delta = 2k + s branch
        return 2.0 * k * k * (k + s_of(k)) - w

    k_c = crit.kappa_c
    k_lo = gamma / 2.0
    w_edge = gamma ** 3 / 4.0   # both parametric branches start here at k=gamma/2
    points: list[SwitchingPoint] = []
    if w <= w_crit * (1.0 + 1e-12):
        # tangency: degenerate window at the critical point
        points = [SwitchingPoint(crit.delta_c, k_c)] * 2
    elif w < w_edge:
        # both double roots on the delta = 2k - s branch
        k1 = brentq(w_minus, k_lo, k_c, xtol=1e-15, rtol=1e-15)
        k_hi = max(w / (gamma * gamma / 4.0) * 1.5, 4.0 * k_c)
        k2 = brentq(w_minus, k_c, k_hi, xtol=1e-15, rtol=1e-15)
        for k in (k1, k2):
            points.append(SwitchingPoint(2.0 * k - s_of(k), k))
    else:
        k_hi = max(2.0 * (w / 2.0) ** (1.0 / 3.0), 4.0 * k_c)
        ka = brentq(w_minus, k_c, max(w / (gamma * gamma / 4.0) * 1.5, 4.0 * k_c),
                    xtol=1e-15, rtol=1e-15)
        kb = brentq(w_plus, k_lo, k_hi, xtol=1e-15, rtol=1e-15)
        points.append(SwitchingPoint(2.0 * ka - s_of(ka), ka))
        points.append(SwitchingPoint(2.0 * kb + s_of(kb), kb))
    points.sort(key=lambda q: q.delta_m)
    if mirror:
        points = [SwitchingPoint(-q.delta_m, -q.kappa) for q in points]
        points.sort(key=lambda q: q.delta_m)
    return points[0], points[1]


@dataclass(frozen=True)
class SweepRecord:
    delta_m: float
    kappa: float
    stable: bool
    squeezing_r: float | None
    branch_id: int


def sweep(p_template: SteadyParams, delta_m_grid) -> list[SweepRecord]:
    """Branch curves over a detuning grid, stitched by continuity in kappa.

    Branch ids follow nearest-neighbor continuation between consecutive
    grid points; roots that cannot be matched open new ids.
    """
    grid = np.asarray(delta_m_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("delta_m_grid must be a nonempty 1-d array")
    diffs = np.diff(grid)
    if not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ValueError("delta_m_grid must be strictly monotone")

    records: list[SweepRecord] = []
    prev: list[tuple[int, float]] = []   # (branch_id, kappa) at previous point
    next_id = 0
    for delta in grid:
        params = SteadyParams(delta_m=float(delta), gamma_m=p_template.gamma_m,
                              kerr_K=p_template.kerr_K,
                              drive_amp=p_template.drive_amp)
        branches = solve_kappa(params)
        assignment: dict[int, int] = {}
        if prev and branches:
            used = set()
            # greedy nearest-neighbor matching on |kappa - kappa_prev|
            pairs = sorted(
                ((abs(b.kappa - pk), i, j)
                 for i, b in enumerate(branches)
                 for j, (_, pk) in enumerate(prev)),
                key=lambda t: t[0])
            for _, i, j in pairs:
                if i in assignment or j in used:
                    continue
                assignment[i] = prev[j][0]
                used.add(j)
        cur: list[tuple[int, float]] = []
        for i, b in enumerate(branches):
            bid = assignment.get(i)
            if bid is None:
                bid = next_id
                next_id += 1
            cur.append((bid, b.kappa))
            records.append(SweepRecord(
                delta_m=float(delta), kappa=b.kappa, stable=b.stable,
                squeezing_r=b.squeezing_r, branch_id=bid))
        prev = cur
    records.sort(key=lambda rec: (rec.delta_m, rec.kappa))
    return records


SWEEP_CSV_HEADER = "delta_m,kappa,stable,r,branch_id"


def sweep_csv_lines(records: list[SweepRecord]) -> list[str]:
    """CSV rows for a sweep (full double precision, deterministic)."""
    lines = [SWEEP_CSV_HEADER]
    for rec in records:
        r_txt = "nan" if rec.squeezing_r is None else f"{rec.squeezing_r:.17e}"
        lines.append(f"{rec.delta_m:.17e},{rec.kappa:.17e},"
                     f"{int(rec.stable)},{r_txt},{rec.branch_id}")
    return lines
