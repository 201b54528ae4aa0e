"""
Table-driven finite renewal model.

Config format (JSON)::

    {
      "events":  [{"id": "e0", "prob": 0.5}, ...],
      "actions": ["a0", "a1", ...],
      "c":       [1.0, ...],
      "shift":   null | number | "auto",          (optional)
      "table": [
        {"event": "e0", "action": "a0",
         "y_hat": 1.0, "t_hat": 1.0, "z_hat": [0.0],
         "outcomes": [{"y": 1.0, "T": 1.0, "z": [0.0], "prob": 1.0}]},
        ...
      ]
    }

Actions available for an event are those with a table entry, in the order of
the ``actions`` list. Declared means must agree with the outcome distribution.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Sequence, Tuple

import numpy as np

from renewal_opt.config import get_tolerance, load_settings
from renewal_opt.exceptions import ModelError
from renewal_opt.models.base import EventSample, Outcome, PerformanceTriple, RenewalModel

logger = logging.getLogger("renewal_opt.models.synthetic")


@dataclass(frozen=True)
class OutcomeDistribution:
    """Discrete distribution over (y, T, z) triples."""

    y: np.ndarray        # (K,)
    T: np.ndarray        # (K,)
    z: np.ndarray        # (K, L)
    prob: np.ndarray     # (K,)
    cdf: np.ndarray      # (K,)

    def mean(self) -> Tuple[float, float, np.ndarray]:
        return float(self.prob @ self.y), float(self.prob @ self.T), self.prob @ self.z

    def draw(self, rng: np.random.Generator) -> int:
        idx = int(np.searchsorted(self.cdf, rng.random(), side="right"))
        return min(idx, len(self.cdf) - 1)


class SyntheticModel(RenewalModel):
    name = "synthetic"

    def __init__(
        self,
        event_ids: Sequence[Any],
        event_probs: Sequence[float],
        action_ids: Sequence[Any],
        c: Sequence[float],
        triples: Dict[Tuple[int, int], PerformanceTriple],
        outcomes: Dict[Tuple[int, int], OutcomeDistribution],
        shift=None,
    ):
        super().__init__(c)
        self._events = tuple(EventSample(index=i, value=eid) for i, eid in enumerate(event_ids))
        self._probs = np.asarray(event_probs, dtype=np.float64)
        self._action_ids = tuple(action_ids)
        self._triples = dict(triples)
        self._outcomes = dict(outcomes)
        self._actions = {
            e.index: tuple(a for a in range(len(self._action_ids)) if (e.index, a) in self._triples)
            for e in self._events
        }
        self._validate_probabilities()
        for e in self._events:
            if not self._actions[e.index]:
                error_msg = f"synthetic model: empty action list for event {e.value!r}"
                logger.error(error_msg)
                raise ModelError(error_msg)
        self._apply_shift(shift)

    @property
    def events(self) -> Tuple[EventSample, ...]:
        return self._events

    @property
    def probabilities(self) -> np.ndarray:
        return self._probs

    @property
    def action_labels(self) -> Tuple[Any, ...]:
        return self._action_ids

    def actions(self, event: EventSample):
        return self._actions[event.index]

    def _raw_expectations(self, event: EventSample, action: int) -> PerformanceTriple:
        return self._triples[(event.index, action)]

    def _raw_realize(self, event: EventSample, action: int, rng: np.random.Generator) -> Outcome:
        dist = self._outcomes[(event.index, action)]
        k = dist.draw(rng)
        return Outcome(y=float(dist.y[k]), T=float(dist.T[k]), z=dist.z[k].copy())

    def _raw_frame_lengths(self, event, action, rng, size):
        dist = self._outcomes[(event.index, action)]
        idx = np.minimum(np.searchsorted(dist.cdf, rng.random(size), side="right"), len(dist.cdf) - 1)
        return dist.T[idx]


def synthetic_from_config(table: Mapping[str, Any], shift=None) -> SyntheticModel:
    """
    Build and validate a SyntheticModel from a parsed config.

    Raises:
        ModelError: malformed tables, invalid probabilities or declared means
            that disagree with the outcome distribution; the message names the
            offending (event, action).
    """
    events = _required(table, "events")
    action_ids = list(_required(table, "actions"))
    c = [float(v) for v in _required(table, "c")]
    L = len(c)

    event_ids = [ev.get("id") for ev in events]
    event_probs = [float(ev.get("prob", -1)) for ev in events]
    if len(set(map(repr, event_ids))) != len(event_ids):
        _fail(f"duplicate event ids in {event_ids!r}")
    if len(set(map(repr, action_ids))) != len(action_ids):
        _fail(f"duplicate action ids in {action_ids!r}")
    event_index = {repr(eid): i for i, eid in enumerate(event_ids)}
    action_index = {repr(aid): i for i, aid in enumerate(action_ids)}

    prob_tol = get_tolerance("PROBABILITY_TOL")
    mean_tol = get_tolerance("MEAN_TOL")
    triples: Dict[Tuple[int, int], PerformanceTriple] = {}
    outcomes: Dict[Tuple[int, int], OutcomeDistribution] = {}

    for row in _required(table, "table"):
        eid, aid = row.get("event"), row.get("action")
        where = f"(event {eid!r}, action {aid!r})"
        if repr(eid) not in event_index or repr(aid) not in action_index:
            _fail(f"{where}: unknown event or action id")
        key = (event_index[repr(eid)], action_index[repr(aid)])
        if key in triples:
            _fail(f"{where}: duplicate table entry")

        z_hat = [float(v) for v in row.get("z_hat", [])]
        if len(z_hat) != L:
            _fail(f"{where}: z_hat has {len(z_hat)} entries, expected L={L}")
        y_hat, t_hat = _number(row, "y_hat", where), _number(row, "t_hat", where)
        if not t_hat >= 1:
            _fail(f"{where}: t_hat={t_hat} must be >= 1")

        rows = row.get("outcomes") or []
        if not rows:
            _fail(f"{where}: outcome distribution is empty")
        ys, Ts, zs, ps = [], [], [], []
        for out in rows:
            z = [float(v) for v in out.get("z", [])]
            if len(z) != L:
                _fail(f"{where}: outcome z has {len(z)} entries, expected L={L}")
            T = _number(out, "T", where)
            if T < 1:
                _fail(f"{where}: outcome T={T} must be >= 1")
            ys.append(_number(out, "y", where))
            Ts.append(T)
            zs.append(z)
            ps.append(_number(out, "prob", where))
        prob = np.array(ps)
        if np.any(prob < 0) or np.any(prob > 1) or abs(prob.sum() - 1.0) > prob_tol:
            _fail(f"{where}: outcome probabilities {ps} are not a distribution")

        dist = OutcomeDistribution(
            y=np.array(ys),
            T=np.array(Ts),
            z=np.array(zs, dtype=np.float64).reshape(len(rows), L),
            prob=prob,
            cdf=np.cumsum(prob),
        )
        mean_y, mean_T, mean_z = dist.mean()
        for label, declared, actual in (
            ("y_hat", y_hat, mean_y),
            ("t_hat", t_hat, mean_T),
        ) + tuple((f"z_hat[{l}]", z_hat[l], float(mean_z[l])) for l in range(L)):
            if abs(declared - actual) > mean_tol * max(1.0, abs(actual)):
                _fail(f"{where}: {label} declared {declared} but outcomes give {actual}")

        triples[key] = PerformanceTriple(y_hat=y_hat, t_hat=t_hat, z_hat=np.array(z_hat))
        outcomes[key] = dist

    return SyntheticModel(
        event_ids=event_ids,
        event_probs=event_probs,
        action_ids=action_ids,
        c=c,
        triples=triples,
        outcomes=outcomes,
        shift=table.get("shift") if shift is None else shift,
    )


def load_synthetic(path: str, shift=None) -> SyntheticModel:
    """Read a synthetic model config from a JSON file; ``shift`` overrides the file's own."""
    return synthetic_from_config(load_settings(path), shift=shift)


def deterministic_model(
    y: float, T: float, z: Sequence[float], c: Sequence[float]
) -> SyntheticModel:
    """Single-event, single-action model whose outcome is always (y, T, z)."""
    return synthetic_from_config(
        {
            "events": [{"id": 0, "prob": 1.0}],
            "actions": [0],
            "c": list(c),
            "table": [
                {
                    "event": 0,
                    "action": 0,
                    "y_hat": y,
                    "t_hat": T,
                    "z_hat": list(z),
                    "outcomes": [{"y": y, "T": T, "z": list(z), "prob": 1.0}],
                }
            ],
        }
    )


def _required(table: Mapping[str, Any], key: str):
    value = table.get(key) if isinstance(table, Mapping) else None
    if value is None:
        _fail(f"missing required field '{key}'")
    return value


def _fail(msg: str):
    error_msg = f"synthetic model: {msg}"
    logger.error(error_msg)
    raise ModelError(error_msg)


def _number(row: Mapping[str, Any], key: str, where: str) -> float:
    try:
        return float(row[key])
    except (KeyError, TypeError, ValueError):
        _fail(f"{where}: field '{key}' missing or not numeric")
