"""Conserved quantities, the initial-data classifier, and proof diagnostics.

The classifier sorts initial data into the regimes with proven outcomes:

* slope criterion v0'(x0) < -|v0(x0)|/sqrt(d) at some point: finite-time
  breaking, with a certified upper bound on the breaking time;
* n0 >= 0 everywhere, or n0 <= 0 left / >= 0 right of a point: global
  existence, with pointwise slope bounds that are machine-checked along
  the run;
* the mirrored sign pattern with a genuine sign change: breaking.

The quantitative machinery behind the blow-up proof (the one-sided
convolution inequalities, the monotone pair A > 0 > B along the critical
characteristic, and the Riccati bound on g = v_x there) is evaluated
numerically so every inequality used in the argument is tested on actual
solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import Field, SimParams, SimState, spectral_derivative
from .helmholtz import one_sided_split
from .lagrangian import ParticleSet, interp

__all__ = [
    "Verdict",
    "Classification",
    "SupNormBound",
    "RiccatiTrace",
    "RiccatiReport",
    "MarginReport",
    "energy",
    "sup_norm_bound",
    "classify_initial_data",
    "convolution_inequality_margin",
    "riccati_tracker",
    "blowup_time_upper_bound",
    "case1_pointwise_bound",
    "case2_onesided_bound",
    "boundary_contamination",
]


def energy(v: Field, d: float) -> float:
    """Conserved energy h*Sum v^2 + d*h*Sum v_x^2 (exact on the period)."""
    vx = spectral_derivative(v, 1)
    h = v.grid.h
    return float(h * np.sum(v.values**2) + d * h * np.sum(vx.values**2))


@dataclass(frozen=True)
class SupNormBound:
    """Rigorous sup-norm bound for the whole run, plus the H1 norm.

    ``m_inf = sqrt(E0 / sqrt(d))`` follows from the conserved energy via
    v^2 <= 2 |v|_2 |v_x|_2 <= E0/sqrt(d); ``h1_norm`` is the looser
    comparison quantity |v0|_{H1}.
    """

    m_inf: float
    h1_norm: float


def sup_norm_bound(v0: Field, d: float) -> SupNormBound:
    e0 = energy(v0, d)
    vx = spectral_derivative(v0, 1)
    h = v0.grid.h
    h1 = math.sqrt(h * float(np.sum(v0.values**2) + np.sum(vx.values**2)))
    return SupNormBound(m_inf=math.sqrt(e0 / math.sqrt(d)), h1_norm=h1)


class Verdict(str, Enum):
    GLOBAL_CASE1 = "global_case1"
    GLOBAL_CASE2 = "global_case2"
    BLOWUP_SLOPE = "blowup_slope"
    BLOWUP_SIGN_PATTERN = "blowup_sign_pattern"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class Classification:
    """Classifier verdict with the quantitative slack of the hypothesis.

    ``x0`` is the designated point (slope minimizer or sign frontier),
    ``sign_pattern`` records the raw n0 pattern independently of the
    verdict precedence, and ``regularity_ok`` is a resolution-level proxy
    for membership in the theorems' Sobolev class (relative spectral mass
    above the 2/3 band; a peakon fails it, smooth profiles pass).
    """

    verdict: Verdict
    x0: float | None
    margins: dict
    sign_pattern: str
    regularity_ok: bool


def _sign_pattern(n0: np.ndarray, x: np.ndarray, tol: float):
    """Classify the sign layout of n0: returns (pattern, split_x or None).

    Patterns: nonnegative | nonpositive | neg_then_pos | pos_then_neg |
    mixed.  Split detection scans every node as a candidate frontier and
    keeps the one with the largest two-sided margin.
    """
    if np.all(n0 >= -tol):
        return "nonnegative", None
    if np.all(n0 <= tol):
        return "nonpositive", None
    prefix_max = np.maximum.accumulate(n0)
    suffix_min = np.minimum.accumulate(n0[::-1])[::-1]
    # neg_then_pos: everything left of the split below tol, right above -tol
    margin_np = np.minimum(-prefix_max, suffix_min)
    i = int(np.argmax(margin_np))
    if margin_np[i] >= -tol:
        return "neg_then_pos", float(x[i])
    prefix_min = np.minimum.accumulate(n0)
    suffix_max = np.maximum.accumulate(n0[::-1])[::-1]
    margin_pn = np.minimum(prefix_min, -suffix_max)
    i = int(np.argmax(margin_pn))
    if margin_pn[i] >= -tol:
        return "pos_then_neg", float(x[i])
    return "mixed", None


def _regularity_ok(v0: Field) -> bool:
    """Spectral-tail smoothness proxy: top-third mass below 1e-12 relative."""
    spec = np.abs(np.fft.rfft(v0.values)) ** 2
    total = float(spec.sum())
    if total == 0.0:
        return True
    cut = v0.grid.n_points // 3
    return float(spec[cut + 1 :].sum()) / total < 1e-12


def classify_initial_data(v0: Field, params: SimParams) -> Classification:
    """Sort initial data against the global-existence and blow-up regimes.

    Precedence: the pointwise slope criterion first (its conclusion is
    sharp and locally checkable), then n0 >= 0, then the two sign-pattern
    regimes, else indeterminate.  Sign tests use the relative tolerance
    ``params.sign_tol`` so spectral ringing at 1e-12 never flips a verdict.
    """
    d = params.d
    rd = math.sqrt(d)
    v0x = spectral_derivative(v0, 1)
    n0 = v0 - d * spectral_derivative(v0, 2)

    slope_margin = v0x.values + np.abs(v0.values) / rd
    slope_scale = float(np.max(np.abs(v0x.values)) + np.max(np.abs(v0.values)) / rd)
    i_min = int(np.argmin(slope_margin))
    worst_slope = float(slope_margin[i_min])

    n_scale = float(np.max(np.abs(n0.values)))
    tol_n = params.sign_tol * n_scale
    pattern, split_x = _sign_pattern(n0.values, v0.grid.x, tol_n)
    changes_sign = bool(
        np.max(n0.values) > tol_n and np.min(n0.values) < -tol_n
    )

    margins = {
        "slope": worst_slope,
        "slope_scale": slope_scale,
        "n_min": float(np.min(n0.values)),
        "n_max": float(np.max(n0.values)),
        "n_scale": n_scale,
    }
    reg = _regularity_ok(v0)

    if worst_slope < -params.sign_tol * slope_scale:
        return Classification(
            Verdict.BLOWUP_SLOPE, float(v0.grid.x[i_min]), margins, pattern, reg
        )
    if pattern == "nonnegative":
        return Classification(Verdict.GLOBAL_CASE1, None, margins, pattern, reg)
    if pattern == "neg_then_pos":
        return Classification(Verdict.GLOBAL_CASE2, split_x, margins, pattern, reg)
    if pattern == "pos_then_neg" and changes_sign:
        return Classification(
            Verdict.BLOWUP_SIGN_PATTERN, split_x, margins, pattern, reg
        )
    return Classification(Verdict.INDETERMINATE, None, margins, pattern, reg)


@dataclass(frozen=True)
class MarginReport:
    """Minima over x of F - w^2/2, G - w^2/2, p_d*(w^2+V^2/2) - w^2/2.

    All three are >= 0 in the continuum for any state; ``scale`` is
    max(w^2 + V^2/2), the size of the quantities entering the inequality.
    """

    margin_f: float
    margin_g: float
    margin_p: float
    scale: float


def convolution_inequality_margin(state: SimState, d: float) -> MarginReport:
    """Evaluate the one-sided convolution inequalities on a state.

    With w = v/sqrt(d) and V = v_x, both one-sided combinations
    F = p*f + sqrt(d) (p*f)_x and G = p*f - sqrt(d) (p*f)_x of
    f = w^2 + V^2/2 dominate w^2/2 pointwise, and so does p*f itself.
    """
    rd = math.sqrt(d)
    w = state.v.values / rd
    V = state.v_x.values
    f = Field(w * w + 0.5 * V * V, state.grid)
    # No decay gate here: margins are diagnostics of whatever state the
    # run is in (boundary health is boundary_contamination's job), and a
    # relative edge leak of size eps only moves them at the eps*scale level.
    r, l = one_sided_split(f, d, decay_tol=math.inf)
    half_w2 = 0.5 * w * w
    margin_f = float(np.min(2.0 * r.values - half_w2))
    margin_g = float(np.min(2.0 * l.values - half_w2))
    margin_p = float(np.min(r.values + l.values - half_w2))
    return MarginReport(
        margin_f=margin_f,
        margin_g=margin_g,
        margin_p=margin_p,
        scale=float(np.max(f.values)),
    )


class RiccatiTrace:
    """Samples of (q, g, A, B) along the designated characteristic.

    g is the slope v_x along q(t, x0), w = v/sqrt(d) there, A = w - g and
    B = w + g.  By construction g = (B - A)/2 and w = (A + B)/2.
    """

    def __init__(self, x0: float):
        self.x0 = float(x0)
        self.t: list[float] = []
        self.q: list[float] = []
        self.g: list[float] = []
        self.a: list[float] = []
        self.b: list[float] = []

    def record(self, state: SimState, particles: ParticleSet) -> None:
        idx = particles.label_index(self.x0)
        qi = float(particles.q[idx])
        g = float(interp(state.v_x, qi))
        w = float(interp(state.v, qi)) / math.sqrt(state.d)
        self.t.append(state.t)
        self.q.append(qi)
        self.g.append(g)
        self.a.append(w - g)
        self.b.append(w + g)

    def __len__(self) -> int:
        return len(self.t)

    def linear_bound(self, d: float) -> np.ndarray:
        """g(0) + (d/2) A(0) B(0) t, the integrated Riccati bound."""
        t = np.asarray(self.t)
        return self.g[0] + 0.5 * d * self.a[0] * self.b[0] * (t - t[0])


@dataclass(frozen=True)
class RiccatiReport:
    """Worst slacks of the Riccati chain along the trace.

    ``bound_excess``: max of g(t) minus the linear bound (<= tol when the
    chain holds); ``a_deficit``: max of A(0) - A(t); ``b_excess``: max of
    B(t) - B(0); ``signs_ok``: A > 0 > B at every sample.
    """

    n_samples: int
    bound_excess: float
    a_deficit: float
    b_excess: float
    signs_ok: bool
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.signs_ok
            and self.bound_excess <= self.tol
            and self.a_deficit <= self.tol
            and self.b_excess <= self.tol
        )


def riccati_tracker(trace: RiccatiTrace, d: float, tol: float | None = None) -> RiccatiReport:
    """Check the trace against the monotone/Riccati bounds of the proof."""
    if len(trace) == 0:
        raise ValueError("empty trace: record at least one sample")
    g = np.asarray(trace.g)
    a = np.asarray(trace.a)
    b = np.asarray(trace.b)
    if tol is None:
        tol = 1e-3 * abs(g[0]) + 1e-12
    bound = trace.linear_bound(d)
    return RiccatiReport(
        n_samples=len(trace),
        bound_excess=float(np.max(g - bound)),
        a_deficit=float(np.max(a[0] - a)),
        b_excess=float(np.max(b - b[0])),
        signs_ok=bool(np.all(a > 0.0) and np.all(b < 0.0)),
        tol=float(tol),
    )


def blowup_time_upper_bound(v0: Field, d: float, x0: float) -> float:
    """Certified upper bound on the breaking time for slope-criterion data.

    With w0 = v0(x0)/sqrt(d), g0 = v0'(x0) and the energy-derived sup
    bound M_inf, the slope reaches the Riccati-dominance level
    g_c = sqrt(2/d) M_inf no later than

        t0 = max(0, (g0 + g_c) / ((d/2)(g0^2 - w0^2)))

    by the linear decay bound, after which g' <= -(d/4) g^2 forces
    divergence within 4/(d |g(t0)|).  Requires A(0) > 0 > B(0), i.e.
    g0 < -|w0| strictly.
    """
    g0 = float(interp(spectral_derivative(v0, 1), x0))
    w0 = float(interp(v0, x0)) / math.sqrt(d)
    a0 = w0 - g0
    b0 = w0 + g0
    if not (a0 > 0.0 and b0 < 0.0):
        raise ValueError(
            f"slope criterion fails at x0={x0}: need v0'(x0) < -|v0(x0)|/sqrt(d), "
            f"got A(0)={a0:.3g}, B(0)={b0:.3g}"
        )
    m_inf = sup_norm_bound(v0, d).m_inf
    g_c = math.sqrt(2.0 / d) * m_inf
    decay_rate = (d / 2.0) * (g0 * g0 - w0 * w0)  # positive by the criterion
    t0 = max(0.0, (g0 + g_c) / decay_rate)
    g_linear = -(g0 + (d / 2.0) * (w0 * w0 - g0 * g0) * t0)
    g_lower = max(g_c, g_linear)
    return t0 + 4.0 / (d * g_lower)


def case1_pointwise_bound(state: SimState, d: float) -> float:
    """max over x of |v_x| - v/sqrt(d); <= 0 in the continuum when n >= 0.

    Outside the everywhere-nonnegative regime the returned violation can
    be positive and means nothing; the caller owns that precondition.
    """
    return float(
        np.max(np.abs(state.v_x.values) - state.v.values / math.sqrt(d))
    )


def case2_onesided_bound(state: SimState, d: float) -> float:
    """max over x of -v_x - |v|/sqrt(d); <= 0 in the continuum for
    neg-then-pos momentum data (one-sided slope bound)."""
    return float(
        np.max(-state.v_x.values - np.abs(state.v.values) / math.sqrt(d))
    )


def boundary_contamination(state: SimState) -> float:
    """max |v| over the outer 5% of the box per side, relative to max|v|.

    Above 1e-8 the periodic truncation is no longer a faithful stand-in
    for the line and runs are flagged.
    """
    v = np.abs(state.v.values)
    scale = float(v.max())
    if scale == 0.0:
        return 0.0
    zone = max(1, state.grid.n_points // 20)
    return float(max(v[:zone].max(), v[-zone:].max()) / scale)
