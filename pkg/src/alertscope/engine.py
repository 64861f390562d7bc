"""Policy evaluation and alert bundling.

Events are judged clause-by-clause (OR of ANDs); matching events are folded
into alerts keyed by (policy, user, endpoint, application), closing a bundle
when the inter-event gap is exceeded, the 100-event cap is hit, or the
stream ends.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Iterable

from .errors import OrderingError
from .model import (
    MAX_EVENTS_PER_ALERT,
    Alert,
    ClauseAttribute,
    ClauseOperator,
    Event,
    Policy,
    PolicyClause,
    utc_hour,
)


@dataclass(frozen=True)
class BundlingConfig:
    """Bundling knobs. The 100-event cap is a data contract, not a knob."""

    gap_seconds: int = 60
    max_events: int = MAX_EVENTS_PER_ALERT

    def __post_init__(self) -> None:
        if self.gap_seconds <= 0:
            raise ValueError("gap_seconds must be positive")
        if self.max_events != MAX_EVENTS_PER_ALERT:
            raise ValueError(f"max_events is fixed at {MAX_EVENTS_PER_ALERT}")


def _attribute_text(event: Event, attribute: ClauseAttribute) -> str:
    if attribute is ClauseAttribute.HOUR_OF_DAY:
        return str(utc_hour(event.start_time))
    value = getattr(event, attribute.value)
    return value.value if hasattr(value, "value") else value


def hour_in_range(hour: int, lo: int, hi: int) -> bool:
    """Inclusive hour range that wraps past midnight: 22..5 covers overnight."""
    if lo <= hi:
        return lo <= hour <= hi
    return hour >= lo or hour <= hi


def eval_clause(event: Event, clause: PolicyClause) -> bool:
    op = clause.operator
    if op is ClauseOperator.HOUR_IN_RANGE:
        lo, hi = clause.value  # type: ignore[misc]
        return hour_in_range(utc_hour(event.start_time), int(lo), int(hi))
    text = _attribute_text(event, clause.attribute)
    if op is ClauseOperator.EQUALS:
        return text == clause.value
    if op is ClauseOperator.NOT_EQUALS:
        return text != clause.value
    if op is ClauseOperator.CONTAINS:
        return str(clause.value) in text
    if op is ClauseOperator.ONE_OF:
        return text in clause.value  # type: ignore[operator]
    raise ValueError(f"unknown operator {op}")


def eval_policy(event: Event, policy: Policy) -> bool:
    return any(all(eval_clause(event, c) for c in disjunct) for disjunct in policy.disjuncts)


def compile_policy(policy: Policy) -> Callable[[Event], bool]:
    """Close over the clause list once; detection over large streams calls the
    matcher millions of times and attribute dispatch in eval_clause adds up."""

    def compile_clause(clause: PolicyClause) -> Callable[[Event], bool]:
        op = clause.operator
        if op is ClauseOperator.HOUR_IN_RANGE:
            lo, hi = (int(v) for v in clause.value)  # type: ignore[union-attr]
            return lambda e: hour_in_range(utc_hour(e.start_time), lo, hi)
        attribute = clause.attribute
        value = clause.value
        if op is ClauseOperator.EQUALS:
            return lambda e: _attribute_text(e, attribute) == value
        if op is ClauseOperator.NOT_EQUALS:
            return lambda e: _attribute_text(e, attribute) != value
        if op is ClauseOperator.CONTAINS:
            needle = str(value)
            return lambda e: needle in _attribute_text(e, attribute)
        if op is ClauseOperator.ONE_OF:
            members = frozenset(value)  # type: ignore[arg-type]
            return lambda e: _attribute_text(e, attribute) in members
        raise ValueError(f"unknown operator {op}")

    disjuncts = [[compile_clause(c) for c in d] for d in policy.disjuncts]
    return lambda event: any(all(c(event) for c in d) for d in disjuncts)


def alert_id_for(policy_id: str, first_event_id: str) -> str:
    # An event opens at most one bundle per policy, so this pair is unique.
    digest = hashlib.sha1(f"{policy_id}|{first_event_id}".encode()).hexdigest()
    return f"a{digest[:15]}"


class _Bundle:
    __slots__ = ("policy", "events")

    def __init__(self, policy: Policy, first: Event) -> None:
        self.policy = policy
        self.events = [first]

    def close(self) -> Alert:
        first = self.events[0]
        return Alert(
            alert_id=alert_id_for(self.policy.policy_id, first.event_id),
            alert_time=first.start_time,
            policy_id=self.policy.policy_id,
            severity=self.policy.severity,
            events=tuple(self.events),
        )


def detect_stream(
    events: Iterable[Event],
    policies: list[Policy],
    config: BundlingConfig = BundlingConfig(),
) -> list[Alert]:
    """Run every policy over a time-ordered event stream and bundle triggers.

    Each matching event joins the open bundle for its (policy, user,
    endpoint, application) key when it starts within ``gap_seconds`` of the
    bundle's last event and the bundle is below the event cap; otherwise the
    bundle closes and a new one opens. Raises OrderingError on unsorted input.
    """
    matchers = [(p, compile_policy(p)) for p in policies]
    open_bundles: dict[tuple[str, str, str, str], _Bundle] = {}
    alerts: list[Alert] = []
    last_time: int | None = None

    for event in events:
        if last_time is not None and event.start_time < last_time:
            raise OrderingError(
                f"event {event.event_id} starts at {event.start_time}, before {last_time}"
            )
        last_time = event.start_time
        for policy, matches in matchers:
            if not matches(event):
                continue
            key = (policy.policy_id, event.user, event.endpoint, event.application)
            bundle = open_bundles.get(key)
            if bundle is not None:
                joinable = (
                    event.start_time - bundle.events[-1].start_time <= config.gap_seconds
                    and len(bundle.events) < config.max_events
                )
                if joinable:
                    bundle.events.append(event)
                    continue
                alerts.append(bundle.close())
            open_bundles[key] = _Bundle(policy, event)

    alerts.extend(bundle.close() for bundle in open_bundles.values())
    alerts.sort(key=lambda a: (a.alert_time, a.alert_id))
    return alerts
