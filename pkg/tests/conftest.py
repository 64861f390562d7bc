import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from alertscope import (
    Activity,
    Alert,
    AlertStore,
    Event,
    GeneratorConfig,
    ResourceType,
    ScenarioSpec,
    default_policies,
    generate,
    inject_scenario,
)
from alertscope.engine import alert_id_for

T0 = 1612137600  # 2021-02-01T00:00:00Z


def mk_event(
    eid="e1",
    user="u001",
    endpoint="ep001",
    application="word.exe",
    resource="C:/Users/u001/doc.docx",
    resource_type=ResourceType.FILE,
    activity=Activity.UPDATE,
    start=T0 + 9 * 3600,
    end=None,
):
    return Event(
        event_id=eid,
        user=user,
        endpoint=endpoint,
        application=application,
        resource=resource,
        resource_type=resource_type,
        activity=activity,
        start_time=start,
        end_time=end if end is not None else start,
    )


def mk_alert(events, policy_id="pol-x", severity=2, alert_id=None):
    events = tuple(events)
    return Alert(
        alert_id=alert_id or alert_id_for(policy_id, events[0].event_id),
        alert_time=events[0].start_time,
        policy_id=policy_id,
        severity=severity,
        events=events,
    )


SMALL_CONFIG = GeneratorConfig(
    user_count=150,
    day_count=60,
    target_alerts=3000,
    noise_budget=600,
    seed=5,
    start_date="2021-02-01",
)

SCENARIO_PARAMS = {
    "setup_spike": {"days": 7, "alerts": 250},
    "giant_alerts": {"count": 2, "min_events": 150, "max_events": 220, "days": 7},
    "pseudo_account_flood": {"start": "2021-02-20", "alerts": 800},
    "wscript_burst": {
        "day": "2021-03-22",
        "burst_alerts": 40,
        "other_users": 20,
        "window_start": "2021-02-22",
    },
    "usb_guid_share": {"day": "2021-03-22", "history_start": "2021-02-22"},
    "autosave_file": {
        "peak_day": "2021-03-15",
        "peak_alerts": 80,
        "hump": ((-2, 12), (-1, 25), (1, 10)),
        "background_days": 12,
    },
    "policy_spike_week": {"week_start": "2021-03-01", "share": 0.20},
}


def build_small_corpus(scenarios=()):
    config = SMALL_CONFIG
    corpus = generate(config, default_policies(config))
    for kind in scenarios:
        corpus = inject_scenario(corpus, ScenarioSpec(kind, SCENARIO_PARAMS[kind]))
    return corpus


@pytest.fixture(scope="session")
def small_corpus():
    """Base corpus plus all seven scenarios, shared read-only."""
    return build_small_corpus(
        (
            "setup_spike",
            "giant_alerts",
            "pseudo_account_flood",
            "wscript_burst",
            "usb_guid_share",
            "autosave_file",
            "policy_spike_week",
        )
    )


def ingest_store(alerts) -> AlertStore:
    store = AlertStore()
    store.ingest(alerts)
    return store


@pytest.fixture(scope="session")
def small_store(small_corpus):
    """Shared store over the scenario corpus. Read-only: tests that change
    exclusions or ingest more data must build their own via ingest_store."""
    return ingest_store(small_corpus.alerts)


def manifest_entry(corpus, kind):
    return next(e for e in corpus.manifest["scenarios"] if e["kind"] == kind)


# acceptance criteria register one (name, verdict, detail) row here; printed
# as a summary block at the end of the run
ACCEPTANCE_RESULTS: list[tuple[str, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, verdict, detail in ACCEPTANCE_RESULTS:
        line = f"{verdict:4s}  {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
