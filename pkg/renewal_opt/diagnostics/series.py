"""
Post-processing of recorded runs.

Everything here works on a ``RecordSeries``: the frame records of one run laid
out column-wise. Index conventions: frame i (0-based) runs with the
pre-update values theta[i] and Q[i]; theta-like series indexed by n have
length N + 1 with entry 0 equal to the empty average.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from renewal_opt.core.controller import FrameRecord
from renewal_opt.exceptions import ValidationError

logger = logging.getLogger("renewal_opt.diagnostics")


@dataclass(frozen=True, eq=False)
class RecordSeries:
    """Column-wise frame records of one run plus the run parameters."""

    event: np.ndarray          # (N,)
    action: np.ndarray         # (N,)
    y: np.ndarray              # (N,)
    T: np.ndarray              # (N,)
    z: np.ndarray              # (N, L)
    summand: np.ndarray        # (N,)
    theta_after: np.ndarray    # (N,)
    Q_after: np.ndarray        # (N, L)
    D_after: np.ndarray        # (N,)
    c: np.ndarray              # (L,)
    V: float
    delta: float
    theta_max: float

    @classmethod
    def from_records(
        cls,
        records: Sequence[FrameRecord],
        c: Sequence[float],
        V: float,
        delta: float,
        theta_max: float,
    ) -> "RecordSeries":
        c = np.asarray(c, dtype=np.float64)
        L = len(c)
        N = len(records)
        return cls(
            event=np.array([r.event_id for r in records], dtype=np.int64),
            action=np.array([r.action_id for r in records], dtype=np.int64),
            y=np.array([r.y for r in records], dtype=np.float64),
            T=np.array([r.T for r in records], dtype=np.float64),
            z=np.array([r.z for r in records], dtype=np.float64).reshape(N, L),
            summand=np.array([r.summand for r in records], dtype=np.float64),
            theta_after=np.array([r.theta_after for r in records], dtype=np.float64),
            Q_after=np.array([r.Q_after for r in records], dtype=np.float64).reshape(N, L),
            D_after=np.array([r.D_after for r in records], dtype=np.float64),
            c=c,
            V=float(V),
            delta=float(delta),
            theta_max=float(theta_max),
        )

    @property
    def N(self) -> int:
        return len(self.y)

    @property
    def L(self) -> int:
        return len(self.c)

    @property
    def theta_pre(self) -> np.ndarray:
        """theta[i] used on frame i."""
        return np.concatenate([[0.0], self.theta_after])[: self.N]

    @property
    def Q_pre(self) -> np.ndarray:
        """Q[i] used on frame i."""
        return np.vstack([np.zeros((1, self.L)), self.Q_after])[: self.N]

    @property
    def q_norm(self) -> np.ndarray:
        """||Q[i]|| for i = 0..N-1."""
        return np.linalg.norm(self.Q_pre, axis=1)

    @property
    def K(self) -> np.ndarray:
        return k_norm_series(self.z, self.T, self.c)

    def divisors(self) -> np.ndarray:
        """n**delta for n = 1..N, computed exactly as the controller does."""
        return np.array([math.pow(n, self.delta) for n in range(1, self.N + 1)])

    def theta_hat(self) -> np.ndarray:
        """Un-clipped pseudo average, length N + 1, theta_hat[0] = 0."""
        return np.concatenate([[0.0], self.D_after / self.divisors()])

    def theta(self) -> np.ndarray:
        """Trimmed pseudo average, length N + 1, theta[0] = 0."""
        return np.concatenate([[0.0], self.theta_after])


def k_norm(z: Sequence[float], T: float, c: Sequence[float]) -> float:
    """K = sqrt(sum_l (z_l - c_l * T)**2)."""
    z = np.asarray(z, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if z.shape != c.shape:
        raise ValidationError(f"z has {len(z)} entries but c has {len(c)}")
    return float(np.linalg.norm(z - c * T))


def k_norm_series(z: np.ndarray, T: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.linalg.norm(z - np.outer(T, c), axis=1)


@dataclass(frozen=True, eq=False)
class ExpMoment:
    mean: np.ndarray
    stderr: np.ndarray
    runs: int


def empirical_exp_moment(runs: Sequence[RecordSeries], r: float) -> ExpMoment:
    """
    Cross-run sample mean and standard error of exp(r * ||Q[n]||) at every
    frame n, truncated to the shortest run.
    """
    if len(runs) < 2:
        error_msg = f"empirical_exp_moment needs at least two independent runs, got {len(runs)}"
        logger.error(error_msg)
        raise ValidationError(error_msg)
    N = min(s.N for s in runs)
    with np.errstate(over="ignore"):
        values = np.exp(r * np.array([s.q_norm[:N] for s in runs]))
    mean = values.mean(axis=0)
    stderr = values.std(axis=0, ddof=1) / math.sqrt(len(runs))
    return ExpMoment(mean=mean, stderr=stderr, runs=len(runs))


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    theta_tilde: np.ndarray    # (N + 1,)
    capped: np.ndarray         # (N,) min(summand_i, cap_i)
    caps: np.ndarray           # (N,)
    flag_A: np.ndarray         # (N,) bool
    flag_B: np.ndarray
    flag_E: np.ndarray

    @property
    def any_flag(self) -> np.ndarray:
        return self.flag_A | self.flag_B | self.flag_E


def truncation_caps(N: int, eta: float, r: float, V: float, L: int) -> np.ndarray:
    """cap_i = (2/eta + 4 sqrt(L) / (eta r V)) * log(i+1)**2."""
    if not (eta > 0 and r > 0 and V > 0):
        raise ValidationError(f"eta, r and V must be positive, got eta={eta}, r={r}, V={V}")
    logs = np.log(np.arange(1, N + 1, dtype=np.float64))
    return (2.0 / eta + 4.0 * math.sqrt(L) / (eta * r * V)) * logs ** 2


def truncated_series(series: RecordSeries, eta: float, r: float, V: Optional[float] = None) -> TruncatedSeries:
    """
    theta_tilde[n+1] = (n+1)**-delta * sum_{i<=n} min(summand_i, cap_i), plus the
    per-frame events that make a summand exceed its cap:

        A_i: y_i - theta_i T_i > (2/eta) log(i+1)**2
        B_i: ||Q_i|| > (2 sqrt(L) / r) log(i+1)
        E_i: K_i > (2/eta) log(i+1)
    """
    V = series.V if V is None else V
    N, L = series.N, series.L
    caps = truncation_caps(N, eta, r, V, L)
    capped = np.minimum(series.summand, caps)
    theta_tilde = np.concatenate([[0.0], np.cumsum(capped) / series.divisors()])

    logs = np.log(np.arange(1, N + 1, dtype=np.float64))
    flag_A = series.y - series.theta_pre * series.T > (2.0 / eta) * logs ** 2
    flag_B = series.q_norm > (2.0 * math.sqrt(L) / r) * logs
    flag_E = series.K > (2.0 / eta) * logs
    return TruncatedSeries(theta_tilde, capped, caps, flag_A, flag_B, flag_E)


@dataclass(frozen=True, eq=False)
class HittingTimeSeries:
    visit_indices: np.ndarray
    S: np.ndarray
    target: float

    def to_dict(self):
        return {"target": self.target, "n_k": self.visit_indices.tolist(), "S": self.S.tolist()}


def hitting_times(theta_tilde: Sequence[float], target: float) -> HittingTimeSeries:
    """
    Visits n_k of theta_tilde below target (consecutive visits counted
    separately) and the gaps S_{n_k} = n_{k+1} - n_k.
    """
    if not math.isfinite(target):
        raise ValidationError(f"target must be finite, got {target}")
    values = np.asarray(theta_tilde, dtype=np.float64)
    visits = np.flatnonzero(values < target)
    return HittingTimeSeries(visit_indices=visits, S=np.diff(visits), target=float(target))


def f_process(trunc: TruncatedSeries, n_k: int) -> np.ndarray:
    """F[n] = sum_{i=n_k}^{n-1} min(summand_i, cap_i) for n = n_k..N."""
    N = len(trunc.capped)
    if not 0 <= n_k <= N:
        raise ValidationError(f"n_k={n_k} outside [0, {N}]")
    return np.concatenate([[0.0], np.cumsum(trunc.capped[n_k:])])


def f_process_violations(trunc: TruncatedSeries, hits: HittingTimeSeries, tol: float = 1e-9) -> int:
    """
    Count frames n in (n_k, n_{k+1}] where theta_tilde[n] >= target yet F[n] < 0.

    Frames after the last visit are measured from that visit.
    """
    N = len(trunc.capped)
    if len(hits.visit_indices) == 0:
        return 0
    prefix = np.concatenate([[0.0], np.cumsum(trunc.capped)])
    n = np.arange(1, N + 1)
    k = np.searchsorted(hits.visit_indices, n, side="left") - 1
    valid = k >= 0
    n, k = n[valid], k[valid]
    n_k = hits.visit_indices[k]
    F = prefix[n] - prefix[n_k]
    above = trunc.theta_tilde[n] >= hits.target
    return int(np.count_nonzero(above & (F < -tol * np.maximum(1.0, np.abs(prefix[n])))))


def flag_counts_by_half(trunc: TruncatedSeries) -> tuple:
    """Truncation-event counts over the first and second half of the run."""
    flags = trunc.any_flag
    half = len(flags) // 2
    return int(flags[:half].sum()), int(flags[half:].sum())
