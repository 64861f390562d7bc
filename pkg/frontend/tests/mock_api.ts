// In-memory ApiClient with a tiny deterministic corpus, including the
// shared-USB-stick fixture (permissive matching pulls in exactly two more
// users). Records every call so tests can assert orchestration behaviour.

import type { ApiClient } from "../src/api";
import type {
  AlertDto,
  ExplorationState,
  FacetResultDto,
  GraphDto,
  GraphQuery,
  GridQuery,
  GridResultDto,
  HistogramBucket,
  HistoryNodeDto,
  HistoryTreeDto,
  Meta,
} from "../src/types";

function alert(id: string, user: string, time: string, policy: string, severity: number, resource: string): AlertDto {
  return {
    alert_id: id,
    alert_time: time,
    policy_id: policy,
    severity,
    events: [
      {
        event_id: `e-${id}`,
        user,
        endpoint: `ep-${user}`,
        application: "explorer.exe",
        resource,
        resource_type: resource.startsWith("usb-vol") ? "usb_device" : "file",
        activity: resource.startsWith("usb-vol") ? "mount" : "update",
        start_time: time,
        end_time: time,
      },
    ],
  };
}

export const CELL_ALERTS: Record<string, AlertDto[]> = {
  "h-usb-day": [
    alert("a1", "u001", "2021-03-08T09:13:00Z", "pol-usb-watch", 5, "usb-vol:{g1}"),
    alert("a2", "u001", "2021-03-08T11:13:00Z", "pol-usb-watch", 5, "usb-vol:{g2}"),
    alert("a3", "u001", "2021-03-08T14:13:00Z", "pol-usb-watch", 5, "usb-vol:{g3}"),
  ],
  "h-docs-day": [
    alert("b1", "u002", "2021-03-09T08:30:00Z", "pol-cloud-backup", 3, "C:/u002/deck.pptx"),
    alert("b2", "u002", "2021-03-09T09:45:00Z", "pol-cloud-backup", 3, "C:/u002/deck.pptx"),
    alert("b3", "u002", "2021-03-09T10:10:00Z", "pol-cloud-backup", 3, "C:/u002/notes.docx"),
  ],
};

const EXACT_GRAPH: GraphDto = {
  nodes: [
    { id: "r:usb-vol:{g1}", kind: "resource", label: "usb-vol:{g1}", alert_count: 1, size_scale: 0.3 },
    { id: "r:usb-vol:{g2}", kind: "resource", label: "usb-vol:{g2}", alert_count: 1, size_scale: 0.3 },
    { id: "r:usb-vol:{g3}", kind: "resource", label: "usb-vol:{g3}", alert_count: 1, size_scale: 0.3 },
    { id: "u:u001", kind: "user", label: "u001", alert_count: 3, size_scale: 0.6 },
  ],
  edges: [
    { user: "u:u001", resource: "r:usb-vol:{g1}", alert_count: 1 },
    { user: "u:u001", resource: "r:usb-vol:{g2}", alert_count: 1 },
    { user: "u:u001", resource: "r:usb-vol:{g3}", alert_count: 1 },
  ],
  seed: "u:u001",
  permissive: false,
  range: { start: "2021-03-01T00:00:00Z", end: "2021-03-10T00:00:00Z" },
};

const PERMISSIVE_GRAPH: GraphDto = {
  ...EXACT_GRAPH,
  permissive: true,
  nodes: [
    ...EXACT_GRAPH.nodes.map((n) =>
      n.id === "r:usb-vol:{g1}" ? { ...n, members: ["usb-vol:{g1}", "usb-vol:{g1};{ga}"] } : n
    ),
    { id: "u:u007", kind: "user", label: "u007", alert_count: 2, size_scale: 0.4 },
    { id: "u:u009", kind: "user", label: "u009", alert_count: 1, size_scale: 0.3 },
  ],
  edges: [
    ...EXACT_GRAPH.edges,
    { user: "u:u007", resource: "r:usb-vol:{g1}", alert_count: 2 },
    { user: "u:u009", resource: "r:usb-vol:{g3}", alert_count: 1 },
  ],
};

export class MockApi implements ApiClient {
  calls: { method: string; args: unknown[] }[] = [];
  gridDelayMs = 0;
  private nodes: HistoryNodeDto[] = [];
  private cursor: string | null = null;
  private nextId = 1;

  private log(method: string, ...args: unknown[]) {
    this.calls.push({ method, args });
  }

  callsTo(method: string) {
    return this.calls.filter((c) => c.method === method);
  }

  async meta(): Promise<Meta> {
    this.log("meta");
    return {
      total_alerts: 6,
      stored_alerts: 6,
      range: { start: "2021-03-01T00:00:00Z", end: "2021-03-10T00:00:00Z" },
      policies: [
        { policy_id: "pol-usb-watch", severity: 5 },
        { policy_id: "pol-cloud-backup", severity: 3 },
      ],
    };
  }

  async histogram(): Promise<HistogramBucket[]> {
    this.log("histogram");
    return [
      { week_start: "2021-03-01", alert_count: 4 },
      { week_start: "2021-03-08", alert_count: 2 },
    ];
  }

  async grid(query: GridQuery): Promise<GridResultDto> {
    this.log("grid", query);
    if (this.gridDelayMs) await new Promise((resolve) => setTimeout(resolve, this.gridDelayMs));
    if (query.view === "TwentyFourHoursByPolicy") {
      return {
        view: query.view,
        rows: ["pol-usb-watch", "pol-cloud-backup"],
        cols: ["09", "10", "11"],
        cells: [
          { row: "pol-usb-watch", col: "09", count: 1, handle: "h-usb-day" },
          { row: "pol-usb-watch", col: "10", count: 0, handle: "h-zero" },
          { row: "pol-usb-watch", col: "11", count: 2, handle: "h-usb-day" },
          { row: "pol-cloud-backup", col: "09", count: 3, handle: "h-docs-day" },
          { row: "pol-cloud-backup", col: "10", count: 0, handle: "h-zero" },
          { row: "pol-cloud-backup", col: "11", count: 0, handle: "h-zero" },
        ],
        meta: { row_severity: { "pol-usb-watch": 5, "pol-cloud-backup": 3 } },
      };
    }
    if (query.view === "DailyTopUsersByPolicy") {
      return {
        view: query.view,
        rows: ["__totals__", "pol-usb-watch", "pol-cloud-backup"],
        cols: ["__totals__", "u001", "u002"],
        cells: [
          { row: "__totals__", col: "__totals__", count: 6, handle: "h-all" },
          { row: "__totals__", col: "u001", count: 3, handle: "h-usb-day" },
          { row: "__totals__", col: "u002", count: 3, handle: "h-docs-day" },
          { row: "pol-usb-watch", col: "__totals__", count: 3, handle: "h-usb-day" },
          { row: "pol-usb-watch", col: "u001", count: 3, handle: "h-usb-day" },
          { row: "pol-usb-watch", col: "u002", count: 0, handle: "h-zero" },
          { row: "pol-cloud-backup", col: "__totals__", count: 3, handle: "h-docs-day" },
          { row: "pol-cloud-backup", col: "u001", count: 0, handle: "h-zero" },
          { row: "pol-cloud-backup", col: "u002", count: 3, handle: "h-docs-day" },
        ],
        meta: { row_severity: { "pol-usb-watch": 5, "pol-cloud-backup": 3 } },
      };
    }
    return {
      view: query.view,
      rows: ["2021-03-08", "2021-03-09"],
      cols: null,
      cells: [
        { row: "2021-03-08", col: null, count: 3, handle: "h-usb-day" },
        { row: "2021-03-09", col: null, count: 3, handle: "h-docs-day" },
      ],
      meta: {},
    };
  }

  async alerts(handle: string): Promise<AlertDto[]> {
    this.log("alerts", handle);
    return CELL_ALERTS[handle] ?? [];
  }

  async facet(handle: string, x: string, y: string, color?: string | null): Promise<FacetResultDto> {
    this.log("facet", handle, x, y, color);
    const alerts = CELL_ALERTS[handle] ?? [];
    const getter = (a: AlertDto, attr: string): string => {
      if (attr === "policy") return a.policy_id;
      if (attr === "alert_hour") return String(Number(a.alert_time.slice(11, 13)));
      if (attr === "event_count") return String(a.events.length);
      return String((a.events[0] as unknown as Record<string, unknown>)[attr] ?? "");
    };
    const groups = new Map<string, string[]>();
    for (const a of alerts) {
      const key = `${getter(a, x)}\u0000${getter(a, y)}`;
      groups.set(key, [...(groups.get(key) ?? []), a.alert_id]);
    }
    const colors: Record<string, string | number> = {};
    if (color) {
      for (const a of alerts) {
        colors[a.alert_id] = color === "severity" ? a.severity : getter(a, color);
      }
    }
    return {
      groups: [...groups.entries()].map(([key, ids]) => {
        const [gx, gy] = key.split("\u0000");
        return { x: gx, y: gy, alert_ids: ids };
      }),
      color_attr: color ?? null,
      color_kind: color ? (color === "severity" ? "continuous" : "categorical") : null,
      colors,
    };
  }

  async graph(query: GraphQuery): Promise<GraphDto> {
    this.log("graph", query);
    return query.permissive ? PERMISSIVE_GRAPH : EXACT_GRAPH;
  }

  async graphNodeHistory(query: GraphQuery, node: string): Promise<GridResultDto> {
    this.log("graphNodeHistory", query, node);
    return {
      view: "SingleUserCalendar",
      rows: ["2021-03-08"],
      cols: null,
      cells: [{ row: "2021-03-08", col: null, count: 3, handle: "h-usb-day" }],
      meta: { node },
    };
  }

  async newSession(): Promise<string> {
    this.log("newSession");
    return "session-1";
  }

  async history(): Promise<HistoryTreeDto> {
    this.log("history");
    return { nodes: this.nodes.map((n) => ({ ...n, state: { ...n.state } })), cursor: this.cursor };
  }

  async historyRecord(state: ExplorationState): Promise<string> {
    this.log("historyRecord", state);
    const nodeId = `n${this.nextId}`;
    this.nodes.push({
      node_id: nodeId,
      parent_id: this.cursor,
      state: JSON.parse(JSON.stringify(state)) as ExplorationState,
      created_at: this.nextId,
      annotation: null,
    });
    this.nextId += 1;
    this.cursor = nodeId;
    return nodeId;
  }

  async historyRestore(nodeId: string): Promise<ExplorationState> {
    this.log("historyRestore", nodeId);
    const node = this.nodes.find((n) => n.node_id === nodeId);
    if (!node) throw new Error(`unknown node ${nodeId}`);
    this.cursor = nodeId;
    return JSON.parse(JSON.stringify(node.state)) as ExplorationState;
  }

  async historyAnnotate(nodeId: string, text: string): Promise<void> {
    this.log("historyAnnotate", nodeId, text);
    const node = this.nodes.find((n) => n.node_id === nodeId);
    if (node) node.annotation = text || null;
  }
}
