"""Stable phase-locked configurations: construction, winding numbers,
exhaustive enumeration and spurious-memory auditing.

Every phase-cohesive equilibrium is identified by its winding vector, the
integer cycle sums of wrapped phase differences over the graph's cycle
basis. The sign convention is fixed once and for all here: traversing a
basis cycle in stored order accumulates wrap(theta_current - theta_next),
which makes the analytic honeycomb construction round-trip exactly.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import jsonutil
from .dynamics import (DEFAULT_CONV_TOL, DEFAULT_ZERO_TOL, StabilityVerdict,
                       canonical_distance, canonicalize, classify_stability,
                       energy, integrate, integrate_batch, rhs, wrap_angle)
from .errors import NonIntegerWindingError, ParameterDomainError, EnumerationBudgetError
from .graphs import Graph, cycle_edge_signs

TWO_PI = 2.0 * np.pi

COHESIVE_MARGIN = 1e-12
WINDING_INT_TOL = 1e-6
MATCH_TOL = 1e-5
SOLVER_RETRIES = 5
PERTURB_AMPLITUDE = 0.1
ENUMERATION_BUDGET = 10_000_000

# Backtracking line search on the coupling energy.
DESCENT_STEP0 = 0.1
DESCENT_SHRINK = 0.5
DESCENT_ARMIJO = 1e-4
DESCENT_MAX_ITERS = 20_000


@dataclass(frozen=True)
class Equilibrium:
    """A verified stable, phase-cohesive equilibrium."""

    theta: np.ndarray                 # canonical form
    winding: tuple[int, ...]
    verdict: StabilityVerdict
    cohesive: bool
    residual: float


def max_winding(cycle_len: int) -> int:
    """Largest winding number a cohesive state can carry on a cycle of
    the given length: ceil(len/4) - 1."""
    return math.ceil(cycle_len / 4) - 1


def winding_box(g: Graph) -> list[range]:
    """Admissible winding range per basis cycle."""
    return [range(-max_winding(len(c)), max_winding(len(c)) + 1)
            for c in g.cycle_basis]


def winding_box_size(g: Graph) -> int:
    size = 1
    for r in winding_box(g):
        size *= len(r)
    return size


def is_phase_cohesive(theta: np.ndarray, g: Graph,
                      margin: float = COHESIVE_MARGIN) -> bool:
    """True when every edge's wrapped phase difference is strictly inside
    (-pi/2, pi/2)."""
    theta = np.asarray(theta, dtype=float)
    d = wrap_angle(theta[g.edge_tails] - theta[g.edge_heads])
    return bool(np.max(np.abs(d)) < np.pi / 2 - margin)


def winding_vector(theta: np.ndarray, g: Graph) -> np.ndarray:
    """Integer winding number of theta around each basis cycle.

    The wrapped steps around a closed walk always sum to a multiple of
    2*pi up to round-off; a residual above WINDING_INT_TOL therefore
    raises NonIntegerWindingError rather than returning a rounded lie.
    """
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta must be finite")
    w = np.empty(len(g.cycle_basis), dtype=int)
    for s, cyc in enumerate(g.cycle_basis):
        idx = np.array(cyc, dtype=np.intp) - 1
        total = float(np.sum(wrap_angle(theta[idx] - theta[np.roll(idx, -1)])))
        raw = total / TWO_PI
        w[s] = round(raw)
        if abs(raw - w[s]) >= WINDING_INT_TOL:
            raise NonIntegerWindingError(
                f"cycle {s}: winding {raw!r} is not an integer")
    return w


def construct_config(winding, cycle_size: int, cycles: int) -> np.ndarray:
    """Analytic equilibrium of the honeycomb chain for a winding vector.

    Within ring p the consecutive path nodes step down by
    2*pi*winding[p]/cycle_size, starting from theta_1 = 0. The result is
    an exact, locally stable equilibrium whenever every entry obeys the
    winding bound.
    """
    winding = [int(k) for k in winding]
    if len(winding) != cycles:
        raise ParameterDomainError(
            f"winding vector has {len(winding)} entries, expected {cycles}")
    bound = max_winding(cycle_size)
    for p, k in enumerate(winding):
        if abs(k) > bound:
            raise ParameterDomainError(
                f"winding[{p}] = {k} outside |k| <= {bound} for cycle size {cycle_size}")
    n = cycles * (cycle_size - 1) + 1
    theta = np.zeros(n)
    pos = 0
    for k in winding:
        step = TWO_PI * k / cycle_size
        for _ in range(cycle_size - 1):
            theta[pos + 1] = theta[pos] - step
            pos += 1
    return canonicalize(theta)


def _spread_initial(g: Graph, winding) -> np.ndarray:
    """Initial guess that already carries the requested winding vector.

    A minimum-norm edge-difference field gamma with the prescribed cycle
    sums 2*pi*w spreads each winding uniformly around its cycle; the
    field is then integrated over a BFS spanning tree from node 1.
    """
    C = cycle_edge_signs(g)
    target = TWO_PI * np.asarray(winding, dtype=float)
    gamma, *_ = np.linalg.lstsq(C, target, rcond=None)

    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(1, g.n + 1)}
    for e, (a, b) in enumerate(g.edges):
        adj[a].append((b, e))
        adj[b].append((a, e))
    theta = np.zeros(g.n)
    seen = {1}
    queue = [1]
    while queue:
        u = queue.pop(0)
        for v, e in adj[u]:
            if v in seen:
                continue
            seen.add(v)
            # gamma[e] models theta_low - theta_high for edge e
            if u < v:
                theta[v - 1] = theta[u - 1] - gamma[e]
            else:
                theta[v - 1] = theta[u - 1] + gamma[e]
            queue.append(v)
    return theta


def _descend(theta: np.ndarray, g: Graph, conv_tol: float) -> tuple[np.ndarray, bool]:
    """Drive theta to a critical point of the coupling energy.

    Backtracking gradient descent (the velocity field is minus the energy
    gradient). The Armijo test carries a machine-noise floor, otherwise
    the line search dead-locks once true energy decrease falls below
    float resolution, well before |rhs| reaches conv_tol. If descent
    stalls anyway, a fixed-step RK4 run finishes the job.
    """
    th = np.asarray(theta, dtype=float).copy()
    f = energy(th, g)
    noise = 64.0 * np.finfo(float).eps * (abs(f) + 1.0)
    for _ in range(DESCENT_MAX_ITERS):
        r = rhs(th, g)
        if float(np.max(np.abs(r))) < conv_tol:
            return th, True
        gn2 = float(r @ r)
        t = DESCENT_STEP0
        moved = False
        while t > 1e-14:
            cand = th + t * r
            fc = energy(cand, g)
            if fc <= f - DESCENT_ARMIJO * t * gn2 + noise:
                th, f, moved = cand, fc, True
                break
            t *= DESCENT_SHRINK
        if not moved:
            break
    if float(np.max(np.abs(rhs(th, g)))) < conv_tol:
        return th, True
    result = integrate(th, g, conv_tol=conv_tol)
    return result.theta, result.converged


def _perturbation_rng(winding, attempt: int) -> np.random.Generator:
    # deterministic per (winding, attempt), independent of call order
    entropy = [attempt] + [int(k) + (1 << 20) for k in winding]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def winding_constrained_solve(g: Graph, winding,
                              conv_tol: float = DEFAULT_CONV_TOL,
                              zero_tol: float = DEFAULT_ZERO_TOL,
                              retries: int = SOLVER_RETRIES) -> Equilibrium | None:
    """Find the stable cohesive equilibrium carrying a winding vector,
    or None when the graph exhibits no such state.

    The winding-spread initial guess is descended to a critical point and
    the result only counts when it is (a) converged, (b) phase-cohesive,
    (c) spectrally stable and (d) still carries the requested winding.
    Failed attempts restart from perturbed copies of the initial guess;
    exhausting the retries means "not exhibited", not an error.
    """
    winding = tuple(int(k) for k in winding)
    if len(winding) != len(g.cycle_basis):
        raise ParameterDomainError(
            f"winding vector has {len(winding)} entries, graph has "
            f"{len(g.cycle_basis)} basis cycles")
    for k, cyc in zip(winding, g.cycle_basis):
        if abs(k) > max_winding(len(cyc)):
            return None

    base = _spread_initial(g, winding)
    for attempt in range(retries + 1):
        if attempt == 0:
            start = base
        else:
            rng = _perturbation_rng(winding, attempt)
            start = base + rng.uniform(-PERTURB_AMPLITUDE, PERTURB_AMPLITUDE, g.n)
        theta, ok = _descend(start, g, conv_tol)
        if not ok:
            continue
        theta = canonicalize(theta)
        if not is_phase_cohesive(theta, g):
            continue
        if tuple(winding_vector(theta, g)) != winding:
            continue
        verdict = classify_stability(theta, g, zero_tol=zero_tol,
                                     residual_tol=10 * conv_tol)
        if not verdict.is_stable:
            continue
        residual = float(np.max(np.abs(rhs(theta, g))))
        return Equilibrium(theta=theta, winding=winding, verdict=verdict,
                           cohesive=True, residual=residual)
    return None


def _solve_task(args) -> tuple[tuple[int, ...], Equilibrium | None]:
    g, winding, conv_tol, zero_tol, retries = args
    return winding, winding_constrained_solve(g, winding, conv_tol=conv_tol,
                                              zero_tol=zero_tol, retries=retries)


def enumerate_exact(g: Graph, conv_tol: float = DEFAULT_CONV_TOL,
                    zero_tol: float = DEFAULT_ZERO_TOL,
                    retries: int = SOLVER_RETRIES,
                    budget: int = ENUMERATION_BUDGET,
                    jobs: int = 1) -> list[Equilibrium]:
    """All stable phase-cohesive equilibria, by checking every admissible
    winding vector.

    Distinct cohesive equilibria carry distinct winding vectors, so the
    hits are deduplicated (and ordered) by winding. Boxes larger than the
    budget raise EnumerationBudgetError; use the sampling estimator then.
    """
    size = winding_box_size(g)
    if size > budget:
        raise EnumerationBudgetError(
            f"winding box has {size} vectors, budget is {budget}; "
            "use sample_estimate instead")
    vectors = list(itertools.product(*winding_box(g)))
    tasks = [(g, w, conv_tol, zero_tol, retries) for w in vectors]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunk = max(1, len(tasks) // (4 * jobs))
            results = list(pool.map(_solve_task, tasks, chunksize=chunk))
    else:
        results = [_solve_task(t) for t in tasks]
    found: dict[tuple[int, ...], Equilibrium] = {}
    for w, eq in results:
        if eq is not None and w not in found:
            found[w] = eq
    return [found[w] for w in sorted(found)]


@dataclass
class AuditReport:
    """Outcome of random-restart convergence trials against a known set."""

    trials: int
    match_counts: dict[tuple[int, ...], int] = field(default_factory=dict)
    non_converged: int = 0
    unmatched_stable: list[Equilibrium] = field(default_factory=list)
    unmatched_other: int = 0

    @property
    def matched(self) -> int:
        return sum(self.match_counts.values())

    @property
    def unmatched(self) -> int:
        return len(self.unmatched_stable) + self.unmatched_other

    def summary_lines(self) -> list[str]:
        lines = [f"trials: {self.trials}",
                 f"matched: {self.matched}",
                 f"non_converged: {self.non_converged}",
                 f"unmatched: {self.unmatched}"]
        for w in sorted(self.match_counts):
            lines.append(f"matched {','.join(str(k) for k in w)}: {self.match_counts[w]}")
        for eq in self.unmatched_stable:
            lines.append(f"spurious winding {eq.winding}: "
                         f"theta {np.array2string(eq.theta, precision=6)}")
        return lines


def _audit_chunk(args):
    states, g, dt, t_max, conv_tol = args
    return integrate_batch(states, g, dt=dt, t_max=t_max, conv_tol=conv_tol)


def audit_spurious(g: Graph, known: list[Equilibrium], trials: int,
                   seed: int = 0, dt: float = 0.01, t_max: float = 1000.0,
                   conv_tol: float = DEFAULT_CONV_TOL,
                   match_tol: float = MATCH_TOL,
                   jobs: int = 1) -> AuditReport:
    """Random-restart the dynamics and match every limit against `known`.

    Initial states are drawn once, up front, from the seeded generator,
    so results are identical however the integration work is split.
    Converged limits match a known equilibrium when the winding vectors
    agree and the canonical distance is below match_tol; a stable limit
    matching nothing is a spurious-memory finding.
    """
    if trials < 0:
        raise ParameterDomainError(f"trials must be >= 0, got {trials}")
    report = AuditReport(trials=trials)
    if trials == 0:
        return report
    rng = np.random.default_rng(seed)
    states = rng.uniform(-np.pi, np.pi, size=(trials, g.n))

    if jobs > 1 and trials >= 2 * jobs:
        chunks = np.array_split(states, jobs)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_audit_chunk,
                                  [(c, g, dt, t_max, conv_tol) for c in chunks]))
        finals = np.vstack([p[0] for p in parts])
        converged = np.concatenate([p[1] for p in parts])
    else:
        finals, converged, _ = integrate_batch(states, g, dt=dt, t_max=t_max,
                                               conv_tol=conv_tol)

    by_winding = {eq.winding: eq for eq in known}
    for i in range(trials):
        if not converged[i]:
            report.non_converged += 1
            continue
        theta = finals[i]
        w = tuple(int(k) for k in winding_vector(theta, g))
        eq = by_winding.get(w)
        if eq is not None and canonical_distance(theta, eq.theta) < match_tol:
            report.match_counts[w] = report.match_counts.get(w, 0) + 1
            continue
        verdict = classify_stability(theta, g, residual_tol=10 * conv_tol)
        if verdict.is_stable:
            report.unmatched_stable.append(Equilibrium(
                theta=theta, winding=w, verdict=verdict,
                cohesive=is_phase_cohesive(theta, g),
                residual=float(np.max(np.abs(rhs(theta, g))))))
        else:
            report.unmatched_other += 1
    return report


def equilibria_to_json(g: Graph, eqs: list[Equilibrium]) -> str:
    """Serialize an enumeration result (graph plus equilibria)."""
    payload = {
        "graph": {
            "n": g.n,
            "coupling_c": g.coupling,
            "edges": [list(e) for e in g.edges],
            "cycle_basis": [list(c) for c in g.cycle_basis],
        },
        "equilibria": [
            {
                "winding": list(eq.winding),
                "theta": [float(x) for x in eq.theta],
                "eigen_max_nonzero": eq.verdict.max_nonzero_eigenvalue(),
                "cohesive": eq.cohesive,
            }
            for eq in eqs
        ],
    }
    return jsonutil.dumps(payload)
