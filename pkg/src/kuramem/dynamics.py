"""Kuramoto vector field, coupling energy, Jacobian and time integration.

The dynamics on a graph g are

    dtheta_i/dt = omega_i + c * sum_j sin(theta_j - theta_i)

summed over neighbors j of i. With equal natural frequencies this is a
gradient flow of the coupling energy, which is what every solver in this
package ultimately descends.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntegrationBlowUpError, NotAnEquilibriumError
from .graphs import Graph

TWO_PI = 2.0 * np.pi

DEFAULT_DT = 0.01
DEFAULT_T_MAX = 1000.0
DEFAULT_CONV_TOL = 1e-9
DEFAULT_ZERO_TOL = 1e-7


def wrap_angle(x):
    """Wrap angles into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), TWO_PI)


def canonicalize(theta: np.ndarray) -> np.ndarray:
    """Canonical form of a phase state: gauge theta_1 = 0, wrap to (-pi, pi]."""
    theta = np.asarray(theta, dtype=float)
    return wrap_angle(theta - theta[0])


def canonical_distance(a: np.ndarray, b: np.ndarray) -> float:
    """l-inf distance between two states modulo global rotation.

    The elementwise difference of the gauge-fixed states is wrapped again
    so that entries sitting on opposite sides of the +/-pi seam compare
    as close.
    """
    d = wrap_angle(canonicalize(a) - canonicalize(b))
    return float(np.max(np.abs(d)))


def _check_length(theta: np.ndarray, g: Graph, name: str = "theta") -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] != g.n:
        raise ValueError(f"{name} has length {theta.shape[-1]}, graph has {g.n} nodes")
    return theta


def rhs(theta: np.ndarray, g: Graph, omega: np.ndarray | None = None) -> np.ndarray:
    """Kuramoto velocity of every oscillator.

    Accepts a single state (n,) or a batch (m, n); the batch form is used
    by the vectorized integrator.
    """
    theta = _check_length(theta, g)
    s = np.sin(theta[..., g.edge_heads] - theta[..., g.edge_tails])
    out = g.coupling * (s @ g.edge_to_node)
    if omega is not None:
        omega = _check_length(omega, g, "omega")
        out = out + omega
    return out


def energy(theta: np.ndarray, g: Graph) -> float:
    """Coupling energy -c * sum over edges of cos(theta_a - theta_b).

    The zero-frequency dynamics descend this function; it is invariant
    under a global rotation of all phases.
    """
    theta = _check_length(theta, g)
    return float(-g.coupling * np.sum(np.cos(theta[g.edge_tails] - theta[g.edge_heads])))


def jacobian(theta: np.ndarray, g: Graph) -> np.ndarray:
    """Jacobian of the velocity field at theta.

    Equals -B diag(c*cos(theta_a - theta_b)) B^T for the oriented
    incidence B; symmetric with zero row sums.
    """
    theta = _check_length(theta, g)
    w = g.coupling * np.cos(theta[g.edge_tails] - theta[g.edge_heads])
    J = np.zeros((g.n, g.n))
    ti, hi = g.edge_tails, g.edge_heads
    np.add.at(J, (ti, hi), w)
    np.add.at(J, (hi, ti), w)
    np.add.at(J, (ti, ti), -w)
    np.add.at(J, (hi, hi), -w)
    return J


@dataclass(frozen=True)
class StabilityVerdict:
    """Spectral verdict at an equilibrium.

    kind is 'stable' when exactly one eigenvalue lies in the zero band
    [-zero_tol, zero_tol] (the rotation mode) and all others are below
    -zero_tol; 'unstable' when any eigenvalue exceeds +zero_tol;
    'marginal' otherwise.
    """

    kind: str
    eigenvalues: tuple[float, ...]
    zero_tol: float

    @property
    def is_stable(self) -> bool:
        return self.kind == "stable"

    def max_nonzero_eigenvalue(self) -> float:
        """Largest eigenvalue once the single rotation mode is removed."""
        ev = list(self.eigenvalues)
        ev.pop(int(np.argmin(np.abs(ev))))
        return max(ev)


def classify_stability(theta: np.ndarray, g: Graph,
                       zero_tol: float = DEFAULT_ZERO_TOL,
                       residual_tol: float = 1e-6) -> StabilityVerdict:
    """Classify an (approximate) equilibrium by the Jacobian spectrum.

    Raises NotAnEquilibriumError when the velocity residual exceeds
    residual_tol, since the spectrum is only meaningful at a stationary
    point.
    """
    theta = _check_length(theta, g)
    residual = float(np.max(np.abs(rhs(theta, g))))
    if residual > residual_tol:
        raise NotAnEquilibriumError(
            f"|rhs|_inf = {residual:.3e} exceeds tolerance {residual_tol:.3e}")
    ev = np.sort(np.linalg.eigvalsh(jacobian(theta, g)))
    in_band = int(np.sum(np.abs(ev) <= zero_tol))
    if np.any(ev > zero_tol):
        kind = "unstable"
    elif in_band == 1:
        kind = "stable"
    else:
        kind = "marginal"
    return StabilityVerdict(kind=kind, eigenvalues=tuple(float(x) for x in ev),
                            zero_tol=zero_tol)


@dataclass
class IntegrationResult:
    theta: np.ndarray          # final state, canonical form
    converged: bool
    t_elapsed: float
    trajectory: list[tuple[float, np.ndarray]] | None = None


def integrate(theta0: np.ndarray, g: Graph, omega: np.ndarray | None = None,
              dt: float = DEFAULT_DT, t_max: float = DEFAULT_T_MAX,
              conv_tol: float = DEFAULT_CONV_TOL,
              record_stride: int | None = None) -> IntegrationResult:
    """Fixed-step classical RK4 integration until phase locking.

    Runs in the frame co-rotating at the mean natural frequency, so a
    phase-locked configuration registers as |rhs|_inf < conv_tol and
    triggers early return. When record_stride is given, every stride-th
    raw state (plus the final one) is collected for trajectory dumps.
    """
    if dt <= 0 or t_max <= 0:
        raise ValueError(f"dt and t_max must be positive, got {dt}, {t_max}")
    theta = _check_length(theta0, g).copy()
    if omega is None:
        om = None
    else:
        omega = _check_length(omega, g, "omega")
        om = omega - float(np.mean(omega))

    steps = int(np.ceil(t_max / dt))
    trajectory = [] if record_stride else None
    t = 0.0
    converged = False
    for step in range(steps + 1):
        k1 = rhs(theta, g, om)
        if trajectory is not None and step % record_stride == 0:
            trajectory.append((t, theta.copy()))
        if float(np.max(np.abs(k1))) < conv_tol:
            converged = True
            break
        if step == steps:
            break
        k2 = rhs(theta + 0.5 * dt * k1, g, om)
        k3 = rhs(theta + 0.5 * dt * k2, g, om)
        k4 = rhs(theta + dt * k3, g, om)
        theta = theta + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(theta)):
            raise IntegrationBlowUpError(f"non-finite state at t = {t:.6g}")
        t += dt
    if trajectory is not None and (not trajectory or trajectory[-1][0] != t):
        trajectory.append((t, theta.copy()))
    return IntegrationResult(theta=canonicalize(theta), converged=converged,
                             t_elapsed=t, trajectory=trajectory)


def integrate_batch(thetas: np.ndarray, g: Graph,
                    dt: float = DEFAULT_DT, t_max: float = DEFAULT_T_MAX,
                    conv_tol: float = DEFAULT_CONV_TOL,
                    check_every: int = 20) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrate many zero-frequency initial states at once.

    Same RK4 scheme and convergence rule as integrate(); rows are dropped
    from the active set as they lock (checked every check_every steps, on
    the stage already computed, so the test costs nothing extra). Returns
    (final canonical states, converged flags, elapsed times).
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float)).copy()
    m = thetas.shape[0]
    _check_length(thetas, g)
    final = np.empty_like(thetas)
    converged = np.zeros(m, dtype=bool)
    t_elapsed = np.zeros(m)
    active = np.arange(m)
    th = thetas
    steps = int(np.ceil(t_max / dt))
    t = 0.0
    for step in range(steps + 1):
        k1 = rhs(th, g)
        if step % check_every == 0 or step == steps:
            done = np.max(np.abs(k1), axis=1) < conv_tol
            if np.any(done):
                idx = active[done]
                final[idx] = th[done]
                converged[idx] = True
                t_elapsed[idx] = t
                keep = ~done
                th, k1, active = th[keep], k1[keep], active[keep]
                if active.size == 0:
                    break
        if step == steps:
            break
        k2 = rhs(th + 0.5 * dt * k1, g)
        k3 = rhs(th + 0.5 * dt * k2, g)
        k4 = rhs(th + dt * k3, g)
        th = th + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(th)):
            raise IntegrationBlowUpError(f"non-finite state at t = {t:.6g}")
        t += dt
    if active.size:
        final[active] = th
        t_elapsed[active] = t
    final = wrap_angle(final - final[:, :1])
    return final, converged, t_elapsed
