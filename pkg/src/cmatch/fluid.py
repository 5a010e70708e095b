"""Fluid-limit solvers: the deterministic curves that greedy trajectories
concentrate around as the graph grows.

The aggregated matched-fraction curve comes from a scalar ODE for G(s), the
cumulative match pressure after a proportion s of arrivals. Its raw form
has a removable 0/0 as the offline side runs out of fresh half-edges; the
numerator 1 - phi_v(q) shares the factor (1 - q) with the denominator, so
after cancelling analytically the integrand is just h_v(q) / mean_v with

    q = 1 - Gamma(G) / mean_u,

where Gamma collapses to phi_u'(1 - G) without capacities and gains one
correction term per unused capacity level otherwise. No epsilon guards are
needed anywhere in the integrand.

The module also integrates the full residual-degree density system (one
equation per degree for free and saturated vertices), and checks it against
the closed transport-equation solution along characteristic curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .degrees import DegreePMF, dominates

_MAX_G_STEP = 1e-2
_MAX_SYSTEM_STEP = 1e-3


# ---------------------------------------------------------------------------
# aggregated G-ODE


@dataclass(frozen=True, eq=False)
class FluidCurve:
    """Numerical solution G on a uniform s-grid with the derived normalized
    matched-fraction curve."""

    grid: np.ndarray
    G: np.ndarray
    matched: np.ndarray
    model_u: str
    model_v: str
    capacity: str
    step: float

    @property
    def endpoint(self) -> float:
        """Normalized matching size at s = 1."""
        return float(self.matched[-1])

    def g_at(self, s) -> float:
        return np.interp(s, self.grid, self.G)

    def matched_at(self, s):
        return np.interp(s, self.grid, self.matched)


@dataclass(frozen=True, eq=False)
class CapacityProfile:
    """Fractions of offline vertices per initial capacity c = 1..C."""

    p: np.ndarray
    mean_cap: float
    cdf: np.ndarray

    @property
    def max_capacity(self) -> int:
        return len(self.p) - 1

    @property
    def fractions(self) -> np.ndarray:
        return self.p[1:]

    @classmethod
    def from_fractions(cls, fractions) -> "CapacityProfile":
        """Build from [p_1, p_2, ..., p_C]; trailing zero mass is trimmed."""
        fr = np.asarray(fractions, dtype=float)
        if fr.ndim != 1 or len(fr) == 0:
            raise ValueError("capacity fractions must be a nonempty vector")
        if np.any(fr < 0):
            raise ValueError("capacity fractions must be nonnegative")
        total = fr.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"capacity fractions sum to {total!r}, not 1")
        fr = fr / total
        nz = np.nonzero(fr)[0]
        fr = fr[: int(nz[-1]) + 1]
        p = np.concatenate([[0.0], fr])
        p.setflags(write=False)
        cdf = np.cumsum(p)
        cdf.setflags(write=False)
        mean_cap = float(np.dot(np.arange(len(p)), p))
        return cls(p=p, mean_cap=mean_cap, cdf=cdf)


def _integrate_g(pmf_u: DegreePMF, pmf_v: DegreePMF, weights, step: float):
    """RK4 on G'(s) = h_v(1 - Gamma(G)/mean_u) / mean_v, G(0) = 0, where
    Gamma(g) = sum_k weights[k] g^k/k! phi_u^{(k+1)}(1 - g)."""
    if not 0.0 < step <= _MAX_G_STEP:
        raise ValueError(f"step must lie in (0, {_MAX_G_STEP}]")
    n_steps = max(1, round(1.0 / step))
    h = 1.0 / n_steps
    mu_u = pmf_u.mean
    mu_v = pmf_v.mean
    weights = [float(w) for w in weights]

    def slope(g: float) -> float:
        total = 0.0
        gk = 1.0
        x = 1.0 - g
        for k, w in enumerate(weights):
            if k:
                gk *= g / k
            total += w * gk * pmf_u.pgf_deriv(x, k + 1)
        q = 1.0 - total / mu_u
        q = min(max(q, 0.0), 1.0)
        return pmf_v.h_ratio(q) / mu_v

    out = np.empty(n_steps + 1)
    out[0] = 0.0
    g = 0.0
    for i in range(n_steps):
        k1 = slope(g)
        k2 = slope(g + 0.5 * h * k1)
        k3 = slope(g + 0.5 * h * k2)
        k4 = slope(g + h * k3)
        g += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        out[i + 1] = g
    grid = np.arange(n_steps + 1) / n_steps
    return grid, out, h


def _matched_curve(pmf_u: DegreePMF, coeffs, G: np.ndarray) -> np.ndarray:
    """Normalized matched fraction 1 - sum_k a_k G^k/k! phi_u^{(k)}(1 - G)."""
    x = np.clip(1.0 - G, 0.0, 1.0)
    total = np.zeros_like(G)
    gk = np.ones_like(G)
    for k, ak in enumerate(coeffs):
        if k:
            gk = gk * G / k
        term = pmf_u.pgf(x) if k == 0 else pmf_u.pgf_deriv(x, k)
        total += ak * gk * term
    return 1.0 - total


def solve_G_capless(pmf_u: DegreePMF, pmf_v: DegreePMF,
                    step: float = 1e-4) -> FluidCurve:
    """Matched-fraction curve without capacities, normalized per offline
    vertex."""
    grid, G, h = _integrate_g(pmf_u, pmf_v, [1.0], step)
    matched = _matched_curve(pmf_u, [1.0], G)
    return FluidCurve(grid=grid, G=G, matched=matched, model_u=pmf_u.label,
                      model_v=pmf_v.label, capacity="none", step=h)


def solve_G_fixed_capacity(pmf_u: DegreePMF, pmf_v: DegreePMF, C: int,
                           step: float = 1e-4) -> FluidCurve:
    """Curve when every offline vertex can absorb C matches, normalized per
    unit of capacity (C per vertex)."""
    if C < 1:
        raise ValueError("capacity must be >= 1")
    weights = [1.0] * C
    coeffs = [1.0 - k / C for k in range(C)]
    grid, G, h = _integrate_g(pmf_u, pmf_v, weights, step)
    matched = _matched_curve(pmf_u, coeffs, G)
    return FluidCurve(grid=grid, G=G, matched=matched, model_u=pmf_u.label,
                      model_v=pmf_v.label, capacity=f"fixed-{C}", step=h)


def solve_G_general_capacity(pmf_u: DegreePMF, pmf_v: DegreePMF,
                             profile: CapacityProfile,
                             step: float = 1e-4) -> FluidCurve:
    """Curve under a capacity profile, normalized per unit of expected
    capacity. Degenerate profiles reduce exactly to the fixed-capacity and
    capacity-less solvers."""
    C = profile.max_capacity
    weights = [1.0 - float(profile.cdf[k]) for k in range(C)]
    coeffs = []
    for k in range(C):
        acc = 0.0
        for c in range(1, C - k + 1):
            acc += c * float(profile.p[c + k])
        coeffs.append(acc / profile.mean_cap)
    grid, G, h = _integrate_g(pmf_u, pmf_v, weights, step)
    matched = _matched_curve(pmf_u, coeffs, G)
    label = "profile-" + ",".join(f"{v:g}" for v in profile.fractions)
    return FluidCurve(grid=grid, G=G, matched=matched, model_u=pmf_u.label,
                      model_v=pmf_v.label, capacity=label, step=h)


def write_fluid_csv(curve: FluidCurve, path) -> None:
    """CSV dump: a model-echo comment line, then s,G,matched rows."""
    with open(path, "w") as fh:
        fh.write(f"# model_u={curve.model_u} model_v={curve.model_v} "
                 f"capacity={curve.capacity} step={curve.step:.12g}\n")
        fh.write("s,G,matched\n")
        for s, g, m in zip(curve.grid, curve.G, curve.matched):
            fh.write(f"{s:.12g},{g:.17g},{m:.17g}\n")


def sup_deviation(traj, curve: FluidCurve) -> float:
    """Sup over the trajectory grid of |simulated - fluid| matched fraction."""
    steps = np.arange(traj.n_arrivals + 1)
    sim = traj.matched_at_step / traj.capacity_total
    ref = curve.matched_at(steps / traj.n_arrivals)
    return float(np.max(np.abs(sim - ref)))


# ---------------------------------------------------------------------------
# full residual-degree density system


@dataclass(frozen=True, eq=False)
class SystemState:
    """Densities at one time: free[i] and saturated[i] are the fractions of
    offline vertices with residual degree i."""

    t: float
    free: np.ndarray
    saturated: np.ndarray


@dataclass(frozen=True, eq=False)
class SystemTrajectory:
    """Residual-degree densities on a uniform time grid; time is measured in
    arrivals per offline vertex."""

    t: np.ndarray
    free: np.ndarray
    saturated: np.ndarray

    def state(self, j: int) -> SystemState:
        return SystemState(t=float(self.t[j]), free=self.free[j],
                           saturated=self.saturated[j])

    def matched_fraction(self) -> np.ndarray:
        """1 - total free density: the aggregated matching size per vertex."""
        return 1.0 - self.free.sum(axis=1)

    def half_edge_mass(self) -> np.ndarray:
        """sum_i i (free_i + saturated_i): live half-edges per vertex, which
        decays exactly linearly at rate mean_v."""
        idx = np.arange(self.free.shape[1])
        return self.free @ idx + self.saturated @ idx


def solve_full_system(pmf_u: DegreePMF, pmf_v: DegreePMF,
                      step: float = 1e-3) -> SystemTrajectory:
    """RK4 on the drift system for per-degree free/saturated densities.

    Integration stops 10 steps short of t = mean_u / mean_v, where the live
    half-edge mass in the denominators vanishes; endpoint values belong to
    the aggregated curve, whose s-parametrization reaches 1 cleanly.
    """
    if not 0.0 < step <= _MAX_SYSTEM_STEP:
        raise ValueError(f"step must lie in (0, {_MAX_SYSTEM_STEP}]")
    mu_u = pmf_u.mean
    mu_v = pmf_v.mean
    if mu_u <= 0 or mu_v <= 0:
        raise ValueError("both degree laws need positive mean")
    i_top = pmf_u.k_max
    idx = np.arange(i_top + 1, dtype=float)
    up = idx + 1.0

    def drift(f: np.ndarray, m: np.ndarray):
        denom = float(idx @ f + idx @ m)
        q = float(idx @ m) / denom
        q = min(max(q, 0.0), 1.0)
        hv = pmf_v.h_ratio(q)
        fs = np.empty_like(f)
        fs[:-1] = f[1:]
        fs[-1] = 0.0
        ms = np.empty_like(m)
        ms[:-1] = m[1:]
        ms[-1] = 0.0
        df = (-idx * mu_v * f + up * (mu_v - hv) * fs) / denom
        dm = (-idx * mu_v * m + up * mu_v * ms + hv * up * fs) / denom
        return df, dm

    t_end = mu_u / mu_v - 10.0 * step
    n_steps = max(1, int(math.floor(t_end / step + 1e-9)))
    f = pmf_u.probs.astype(float)
    m = np.zeros_like(f)
    free = np.empty((n_steps + 1, i_top + 1))
    sat = np.empty_like(free)
    free[0] = f
    sat[0] = m
    half = 0.5 * step
    for j in range(n_steps):
        k1f, k1m = drift(f, m)
        k2f, k2m = drift(f + half * k1f, m + half * k1m)
        k3f, k3m = drift(f + half * k2f, m + half * k2m)
        k4f, k4m = drift(f + step * k3f, m + step * k3m)
        f = f + (step / 6.0) * (k1f + 2.0 * k2f + 2.0 * k3f + k4f)
        m = m + (step / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
        lo = min(f.min(), m.min())
        if lo < -1e-10:
            raise RuntimeError(f"density went negative ({lo}) at step {j}; "
                               "reduce the step size")
        np.maximum(f, 0.0, out=f)
        np.maximum(m, 0.0, out=m)
        free[j + 1] = f
        sat[j + 1] = m
    t = np.arange(n_steps + 1) * step
    return SystemTrajectory(t=t, free=free, saturated=sat)


# ---------------------------------------------------------------------------
# transport-equation identity along characteristics


@dataclass(frozen=True, eq=False)
class CharacteristicsReport:
    """Discrepancy between the density system's generating series and its
    closed-form transport solution at sampled (t, s) points."""

    max_discrepancy: float
    t_values: np.ndarray
    s_values: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray


def verify_characteristics(pmf_u: DegreePMF, pmf_v: DegreePMF,
                           samples: int = 100, step: float = 1e-4,
                           seed: int = 0,
                           system: SystemTrajectory | None = None) -> CharacteristicsReport:
    """Cross-check the two fluid solvers through the characteristic curves.

    Solves the scalar auxiliary ODE

        F'(t) = exp(-mean_v t) h_v(1 - phi_u'(1 - F)/mean_u),  F(0) = 0,

    then compares the density system's generating series, evaluated at the
    warped time (mean_u/mean_v)(1 - exp(-mean_v t)), against
    phi_u((s - 1) exp(-mean_v t) + 1 - F(t)) at `samples` random (t, s)
    points. Both sides are independent numerical paths.
    """
    if samples < 1:
        raise ValueError("need at least one sample point")
    sys_traj = system if system is not None else solve_full_system(
        pmf_u, pmf_v, min(step, _MAX_SYSTEM_STEP))
    mu_u = pmf_u.mean
    mu_v = pmf_v.mean
    tau_end = float(sys_traj.t[-1])
    t_max = -math.log(1.0 - tau_end * mu_v / mu_u) / mu_v

    def slope(t: float, F: float) -> float:
        q = 1.0 - pmf_u.pgf_deriv(1.0 - F, 1) / mu_u
        q = min(max(q, 0.0), 1.0)
        return math.exp(-mu_v * t) * pmf_v.h_ratio(q)

    n_steps = max(1, int(math.ceil(t_max / step)))
    h = t_max / n_steps
    f_grid = np.empty(n_steps + 1)
    f_grid[0] = 0.0
    val = 0.0
    for j in range(n_steps):
        t0 = j * h
        k1 = slope(t0, val)
        k2 = slope(t0 + 0.5 * h, val + 0.5 * h * k1)
        k3 = slope(t0 + 0.5 * h, val + 0.5 * h * k2)
        k4 = slope(t0 + h, val + h * k3)
        val += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        f_grid[j + 1] = val
    t_grid = np.arange(n_steps + 1) * h

    rng = np.random.default_rng(seed)
    ts = rng.random(samples) * t_max
    ss = rng.random(samples)
    decay = np.exp(-mu_v * ts)
    taus = (mu_u / mu_v) * (1.0 - decay)
    f_at = np.interp(ts, t_grid, f_grid)

    lhs = np.zeros(samples)
    s_pow = np.ones(samples)
    for i in range(sys_traj.free.shape[1]):
        fi = np.interp(taus, sys_traj.t, sys_traj.free[:, i])
        lhs += fi * s_pow
        s_pow *= ss
    arg = np.clip((ss - 1.0) * decay + 1.0 - f_at, 0.0, 1.0)
    rhs = pmf_u.pgf(arg)
    gap = np.abs(lhs - rhs)
    return CharacteristicsReport(max_discrepancy=float(gap.max()),
                                 t_values=ts, s_values=ss, lhs=lhs, rhs=rhs)


# ---------------------------------------------------------------------------
# closed forms and model comparison


def closed_form_2regular(s: float) -> tuple:
    """Exact (G, matched) on the 2-regular model: G = exp(s/2) - 1."""
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    g = math.exp(s / 2.0) - 1.0
    return g, 1.0 - (1.0 - g) ** 2


def closed_form_er(c: float) -> float:
    """Exact endpoint on the Poisson(c)/Poisson(c) model:
    1 - log(2 - exp(-c)) / c. Below c = 1e-6 the direct form cancels
    catastrophically; the quadratic Taylor value c - c^2 is returned."""
    if c <= 0:
        raise ValueError("parameter must be positive")
    if c < 1e-6:
        return c - c * c
    return 1.0 - math.log(2.0 - math.exp(-c)) / c


@dataclass(frozen=True, eq=False)
class ModelComparison:
    """Endpoints of two online-side laws sharing the offline law; when the
    first law's generating series dominates the second's, the second model
    matches at least as much."""

    endpoint_1: float
    endpoint_2: float
    ordered: bool


def compare_models(pmf_u: DegreePMF, pmf_v1: DegreePMF, pmf_v2: DegreePMF,
                   step: float = 1e-4, grid_size: int = 1000) -> ModelComparison:
    """Solve both capacity-less curves and report the endpoint ordering.

    Requires equal online means and generating-series dominance of model 1
    over model 2 (checked on a grid); raises ValueError when the hypothesis
    fails, since the ordering is then unfounded.
    """
    if not dominates(pmf_v1, pmf_v2, grid_size=grid_size):
        raise ValueError("generating series of model 1 does not dominate model 2")
    e1 = solve_G_capless(pmf_u, pmf_v1, step).endpoint
    e2 = solve_G_capless(pmf_u, pmf_v2, step).endpoint
    return ModelComparison(endpoint_1=e1, endpoint_2=e2,
                           ordered=e2 >= e1 - 1e-6)
