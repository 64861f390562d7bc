"""JSON wire formats for events, policies, alerts and exclusion configs.

Timestamps travel as ISO-8601 UTC strings ("2021-03-15T08:30:00Z") and are
integer epoch seconds in memory.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from typing import IO, Iterable, Iterator

from .errors import ParseError
from .model import (
    Activity,
    Alert,
    ClauseAttribute,
    ClauseOperator,
    Event,
    ExclusionSet,
    Policy,
    PolicyClause,
    ResourceType,
    TimeRange,
)


def ts_to_iso(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def iso_to_ts(text: str) -> int:
    try:
        if text.endswith("Z"):
            text = text[:-1] + "+00:00"
        dt = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ParseError(f"bad timestamp {text!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def event_to_json(event: Event) -> dict:
    return {
        "event_id": event.event_id,
        "user": event.user,
        "endpoint": event.endpoint,
        "application": event.application,
        "resource": event.resource,
        "resource_type": event.resource_type.value,
        "activity": event.activity.value,
        "start_time": ts_to_iso(event.start_time),
        "end_time": ts_to_iso(event.end_time),
    }


def event_from_json(obj: dict) -> Event:
    try:
        event = Event(
            event_id=str(obj["event_id"]),
            user=str(obj["user"]),
            endpoint=str(obj["endpoint"]),
            application=str(obj["application"]),
            resource=str(obj["resource"]),
            resource_type=ResourceType(obj["resource_type"]),
            activity=Activity(obj["activity"]),
            start_time=iso_to_ts(obj["start_time"]),
            end_time=iso_to_ts(obj["end_time"]),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"bad event record: {exc}") from exc
    if event.end_time < event.start_time:
        raise ParseError(f"event {event.event_id}: end_time precedes start_time")
    if not (event.user and event.endpoint and event.application):
        raise ParseError(f"event {event.event_id}: empty user, endpoint or application")
    return event


def clause_to_json(clause: PolicyClause) -> dict:
    value = clause.value
    if isinstance(value, tuple):
        value = list(value)
    return {"attribute": clause.attribute.value, "operator": clause.operator.value, "value": value}


def clause_from_json(obj: dict) -> PolicyClause:
    try:
        operator = ClauseOperator(obj["operator"])
        value = obj["value"]
        if operator is ClauseOperator.HOUR_IN_RANGE:
            value = (int(value[0]), int(value[1]))
        elif operator is ClauseOperator.ONE_OF:
            value = tuple(str(v) for v in value)
        else:
            value = str(value)
        return PolicyClause(
            attribute=ClauseAttribute(obj["attribute"]), operator=operator, value=value
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"bad clause: {exc}") from exc


def policy_to_json(policy: Policy) -> dict:
    return {
        "policy_id": policy.policy_id,
        "name": policy.name,
        "severity": policy.severity,
        "disjuncts": [[clause_to_json(c) for c in d] for d in policy.disjuncts],
    }


def policy_from_json(obj: dict) -> Policy:
    try:
        return Policy(
            policy_id=str(obj["policy_id"]),
            name=str(obj["name"]),
            severity=int(obj["severity"]),
            disjuncts=tuple(
                tuple(clause_from_json(c) for c in disjunct) for disjunct in obj["disjuncts"]
            ),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"bad policy record: {exc}") from exc


def alert_to_json(alert: Alert) -> dict:
    return {
        "alert_id": alert.alert_id,
        "alert_time": ts_to_iso(alert.alert_time),
        "policy_id": alert.policy_id,
        "severity": alert.severity,
        "events": [event_to_json(e) for e in alert.events],
    }


def alert_from_json(obj: dict) -> Alert:
    try:
        return Alert(
            alert_id=str(obj["alert_id"]),
            alert_time=iso_to_ts(obj["alert_time"]),
            policy_id=str(obj["policy_id"]),
            severity=int(obj["severity"]),
            events=tuple(event_from_json(e) for e in obj["events"]),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad alert record: {exc}") from exc


def exclusions_to_json(exclusions: ExclusionSet) -> dict:
    return {
        "excluded_ranges": [
            {"start": ts_to_iso(r.start), "end": ts_to_iso(r.end)}
            for r in exclusions.excluded_ranges
        ],
        "excluded_users": sorted(exclusions.excluded_users),
    }


def exclusions_from_json(obj: dict) -> ExclusionSet:
    try:
        ranges = tuple(
            TimeRange(iso_to_ts(r["start"]), iso_to_ts(r["end"]))
            for r in obj.get("excluded_ranges", [])
        )
        return ExclusionSet(
            excluded_ranges=ranges,
            excluded_users=frozenset(str(u) for u in obj.get("excluded_users", [])),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad exclusion config: {exc}") from exc


def write_jsonl(records: Iterable[dict], fh: IO[str]) -> int:
    count = 0
    for record in records:
        fh.write(json.dumps(record, separators=(",", ":")) + "\n")
        count += 1
    return count


def read_jsonl(fh: IO[str]) -> Iterator[dict]:
    for lineno, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: invalid JSON") from exc
