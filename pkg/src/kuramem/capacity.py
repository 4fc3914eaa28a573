"""Counting stable configurations, exactly or by sampling, and the
topology-comparison experiment sweep.

For small winding boxes every vector is checked; large boxes are treated
by uniform sampling with replacement, estimating the fraction of vectors
exhibited by a stable cohesive equilibrium. Confidence intervals use the
Wilson score, which stays sane at hit rates of 0 and 1 where the normal
approximation collapses.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .dynamics import DEFAULT_CONV_TOL
from .equilibria import (ENUMERATION_BUDGET, enumerate_exact, winding_box,
                         winding_box_size, winding_constrained_solve)
from .errors import ParameterDomainError
from .graphs import (Graph, build_hex_array, build_honeycomb,
                     build_honeycomb_chain, build_square_array, build_tri_array)

# two-sided 95% normal quantile
Z_95 = 1.959963984540054

DEFAULT_SAMPLES = 500
EXACT_THRESHOLD = 100_000


@dataclass(frozen=True)
class CapacityEstimate:
    """Count of stable cohesive configurations, exact or estimated.

    Sampled estimates carry a 95% Wilson interval scaled to the box size;
    exact counts collapse the interval onto the count itself.
    """

    box_size: int
    exact: int | None = None
    estimate: float | None = None
    ci_low: float = 0.0
    ci_high: float = 0.0
    samples: int = 0
    hits: int = 0
    seed: int = 0

    @property
    def count(self) -> float:
        return float(self.exact if self.exact is not None else self.estimate)


def wilson_interval(hits: int, samples: int, z: float = Z_95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if samples < 1:
        raise ParameterDomainError(f"samples must be >= 1, got {samples}")
    if not 0 <= hits <= samples:
        raise ParameterDomainError(f"hits {hits} outside 0..{samples}")
    p = hits / samples
    z2 = z * z
    denom = 1.0 + z2 / samples
    center = (p + z2 / (2 * samples)) / denom
    half = (z / denom) * np.sqrt(p * (1 - p) / samples + z2 / (4 * samples * samples))
    # at the boundaries center == half holds exactly; don't let round-off
    # push the interval off the observed proportion
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == samples else min(1.0, center + half)
    return lo, hi


def count_exact(g: Graph, conv_tol: float = DEFAULT_CONV_TOL,
                budget: int = ENUMERATION_BUDGET, jobs: int = 1) -> CapacityEstimate:
    """Exact configuration count by exhaustive winding enumeration."""
    eqs = enumerate_exact(g, conv_tol=conv_tol, budget=budget, jobs=jobs)
    count = len(eqs)
    return CapacityEstimate(box_size=winding_box_size(g), exact=count,
                            ci_low=float(count), ci_high=float(count))


def sample_estimate(g: Graph, samples: int, seed: int = 0,
                    conv_tol: float = DEFAULT_CONV_TOL) -> CapacityEstimate:
    """Estimate the count by sampling winding vectors with replacement.

    The solver is deterministic per winding vector, so repeated draws are
    resolved through a cache; the estimator is the hit fraction scaled by
    the box size, with a Wilson 95% interval scaled and clipped the same
    way.
    """
    if samples < 1:
        raise ParameterDomainError(f"samples must be >= 1, got {samples}")
    box = winding_box(g)
    box_size = winding_box_size(g)
    rng = np.random.default_rng(seed)
    lows = np.array([r.start for r in box])
    highs = np.array([r.stop for r in box])  # exclusive
    draws = rng.integers(lows, highs, size=(samples, len(box)))
    cache: dict[tuple[int, ...], bool] = {}
    hits = 0
    for row in draws:
        w = tuple(int(k) for k in row)
        if w not in cache:
            cache[w] = winding_constrained_solve(g, w, conv_tol=conv_tol) is not None
        hits += cache[w]
    lo, hi = wilson_interval(hits, samples)
    return CapacityEstimate(box_size=box_size,
                            estimate=box_size * hits / samples,
                            ci_low=box_size * lo, ci_high=box_size * hi,
                            samples=samples, hits=hits, seed=seed)


_BUILDERS = {
    "honeycomb": build_honeycomb,
    "honeycomb_chain": build_honeycomb_chain,
    "hex": build_hex_array,
    "hex_array": build_hex_array,
    "square": build_square_array,
    "square_array": build_square_array,
    "tri": build_tri_array,
    "tri_array": build_tri_array,
}


def build_topology(kind: str, p1: int, p2: int, coupling: float = 1.0) -> Graph:
    """Dispatch a builder by name; (p1, p2) is (nc, m) for honeycombs and
    (rows, cols) for arrays. Array kinds accept both short and _array names."""
    try:
        builder = _BUILDERS[kind]
    except KeyError:
        raise ParameterDomainError(
            f"unknown topology {kind!r}, expected one of {sorted(_BUILDERS)}")
    return builder(p1, p2, coupling)


RESULT_FIELDS = ("topology", "param1", "param2", "n_nodes", "mode", "count",
                 "ci_low", "ci_high", "samples", "seed", "wall_ms")


def _family_rows(family: dict) -> list[tuple[str, int, int]]:
    kind = family["topology"]
    if kind not in _BUILDERS:
        raise ParameterDomainError(f"unknown topology {kind!r} in experiment config")
    if "m_values" in family:
        nc = int(family["nc"])
        return [(kind, nc, int(m)) for m in family["m_values"]]
    if "sizes" in family:
        return [(kind, int(r), int(c)) for r, c in family["sizes"]]
    raise ParameterDomainError(
        f"family {kind!r} needs either 'nc'+'m_values' or 'sizes'")


def run_experiment(config: dict, jobs: int = 1) -> list[dict]:
    """Sweep the configured topology families and count configurations.

    Config keys: seed (int), samples (int), exact_threshold (int), and
    families, a list of {"topology": ..., "nc": ..., "m_values": [...]}
    or {"topology": ..., "sizes": [[r, c], ...]} entries. Rows whose
    winding box is at most exact_threshold are enumerated exactly, the
    rest sampled. Per-row failures are recorded, not fatal.
    """
    base_seed = int(config.get("seed", 0))
    samples = int(config.get("samples", DEFAULT_SAMPLES))
    threshold = int(config.get("exact_threshold", EXACT_THRESHOLD))
    rows: list[tuple[str, int, int]] = []
    for family in config.get("families", []):
        rows.extend(_family_rows(family))

    out = []
    for index, (kind, p1, p2) in enumerate(rows):
        row_seed = int(np.random.SeedSequence((base_seed, index)).generate_state(1)[0])
        start = time.perf_counter()
        record = {"topology": kind, "param1": p1, "param2": p2,
                  "seed": row_seed, "samples": 0}
        try:
            g = build_topology(kind, p1, p2)
            record["n_nodes"] = g.n
            if winding_box_size(g) <= threshold:
                est = count_exact(g, jobs=jobs)
                record["mode"] = "exact"
            else:
                est = sample_estimate(g, samples, seed=row_seed)
                record["mode"] = "sample"
                record["samples"] = samples
            record.update(count=est.count, ci_low=est.ci_low, ci_high=est.ci_high)
        except Exception as exc:  # keep sweeping, report the failure in-row
            record.update(n_nodes=record.get("n_nodes", 0), mode="error",
                          count="", ci_low="", ci_high="", error=str(exc))
        record["wall_ms"] = format(1000.0 * (time.perf_counter() - start), ".3f")
        out.append(record)
    return out


def results_to_csv(rows: list[dict]) -> str:
    lines = [",".join(RESULT_FIELDS)]
    for row in rows:
        lines.append(",".join(_csv_cell(row.get(f, "")) for f in RESULT_FIELDS))
    return "\n".join(lines) + "\n"


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)
