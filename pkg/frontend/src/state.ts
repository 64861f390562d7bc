import type { ApiClient } from "./api";
import type {
  AlertDto,
  ConsoleMode,
  ExplorationState,
  FacetResultDto,
  GraphDto,
  GraphQuery,
  GridQuery,
  GridResultDto,
  HistogramBucket,
  HistoryTreeDto,
  Meta,
  PanelName,
} from "./types";

const DAY_MS = 86_400_000;

export interface FacetPanelData {
  result: FacetResultDto | null;
  alerts: AlertDto[];
  constants: Record<string, string | number>;
}

export interface PanelData {
  histogram: HistogramBucket[];
  grids: GridResultDto[];
  facet: FacetPanelData;
  graph: GraphDto | null;
  nodeHistory: GridResultDto | null;
  detail: AlertDto | null;
  historyTree: HistoryTreeDto | null;
}

function isoDayStart(iso: string): string {
  return iso.slice(0, 10) + "T00:00:00Z";
}

function addDays(iso: string, days: number): string {
  return new Date(Date.parse(iso) + days * DAY_MS).toISOString().slice(0, 19) + "Z";
}

/** Attributes sharing one value across every alert (and bundled event) of a
 * selection — the "alert constants" tab. */
export function alertConstants(alerts: AlertDto[]): Record<string, string | number> {
  if (!alerts.length) return {};
  const constants: Record<string, string | number> = {};
  const alertLevel: (keyof AlertDto)[] = ["policy_id", "severity"];
  for (const attr of alertLevel) {
    const values = new Set(alerts.map((a) => a[attr] as string | number));
    if (values.size === 1) constants[attr] = [...values][0];
  }
  const eventLevel = ["user", "endpoint", "application", "resource", "resource_type", "activity"] as const;
  for (const attr of eventLevel) {
    const values = new Set(alerts.flatMap((a) => a.events.map((e) => e[attr])));
    if (values.size === 1) constants[attr] = [...values][0];
  }
  return constants;
}

export const DEFAULT_FACET_AXES = { x: "policy", y: "user", color: null as string | null };

/**
 * Central coordinator: owns the exploration state, fans queries out to the
 * panels (latest response wins per panel), and posts exactly one history
 * record per state-changing interaction. Purely visual settings (collapse,
 * layout mode, redaction) never touch history.
 */
export class Console {
  state: ExplorationState = {
    label: "session start",
    brush_start: null,
    brush_end: null,
    grid_specs: [],
    selection_handles: [],
    facet_spec: { ...DEFAULT_FACET_AXES },
    graph_seed: null,
    graph_seed_kind: null,
    permissive: false,
    policy_filter: [],
    focus_user: null,
    exclusion_epoch: 0,
  };

  visual = {
    collapsed: { overview: false, grids: false, facet: false, graph: false, history: false } as Record<PanelName, boolean>,
    graphLayout: "regimented" as "force" | "regimented",
    redacted: false,
    mode: "historic" as ConsoleMode,
  };

  data: PanelData = {
    histogram: [],
    grids: [],
    facet: { result: null, alerts: [], constants: {} },
    graph: null,
    nodeHistory: null,
    detail: null,
    historyTree: null,
  };

  meta: Meta | null = null;

  private listeners: (() => void)[] = [];
  private tickets: Record<string, number> = {};

  constructor(private api: ApiClient) {}

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  private fresh(panel: string): number {
    this.tickets[panel] = (this.tickets[panel] ?? 0) + 1;
    return this.tickets[panel];
  }

  private isCurrent(panel: string, ticket: number): boolean {
    return this.tickets[panel] === ticket;
  }

  // -- boot -----------------------------------------------------------------

  async init(): Promise<void> {
    this.meta = await this.api.meta();
    await this.api.newSession();
    const start = this.meta.range.start ? isoDayStart(this.meta.range.start) : "1970-01-01T00:00:00Z";
    const end = this.meta.range.end ?? "1970-01-02T00:00:00Z";
    this.state.brush_start = start;
    this.state.brush_end = end;
    this.data.histogram = await this.api.histogram();
    this.state.grid_specs = this.deriveGridSpecs();
    await this.refreshGrids();
    await this.commit("session start");
    this.emit();
  }

  // -- derived specs ----------------------------------------------------------

  private deriveGridSpecs(): GridQuery[] {
    const start = this.state.brush_start!;
    const end = this.state.brush_end!;
    const shared = {
      policies: this.state.policy_filter.length ? [...this.state.policy_filter] : undefined,
    };
    if (this.visual.mode === "daily") {
      // triage mode looks at the last full day of the brushed range
      const day = isoDayStart(addDays(end, -1));
      const dayEnd = addDays(day, 1);
      return [
        { view: "DailyTopUsers", start: day, end: dayEnd, top_n: 300, ...shared },
        { view: "DailyTopUsersByPolicy", start: day, end: dayEnd, top_n: 50, ...shared },
        { view: "TwentyFourHoursByPolicy", start: day, end: dayEnd, ...shared },
      ];
    }
    const specs: GridQuery[] = [
      { view: "Calendar", start, end, ...shared },
      { view: "HistoricTopUsers", start, end, top_n: 300, ...shared },
    ];
    if (this.state.focus_user) {
      specs.push({ view: "SingleUserCalendar", start, end, user: this.state.focus_user, ...shared });
    }
    return specs;
  }

  private async refreshGrids(): Promise<void> {
    const ticket = this.fresh("grids");
    const results = await Promise.all(this.state.grid_specs.map((spec) => this.api.grid(spec)));
    if (!this.isCurrent("grids", ticket)) return;
    this.data.grids = results;
  }

  private graphQuery(): GraphQuery | null {
    if (!this.state.graph_seed || !this.state.graph_seed_kind) return null;
    return {
      seed: this.state.graph_seed,
      kind: this.state.graph_seed_kind,
      start: this.state.brush_start!,
      end: this.state.brush_end!,
      permissive: this.state.permissive,
    };
  }

  private async refreshGraph(): Promise<void> {
    const query = this.graphQuery();
    const ticket = this.fresh("graph");
    const graph = query ? await this.api.graph(query) : null;
    if (!this.isCurrent("graph", ticket)) return;
    this.data.graph = graph;
    this.data.nodeHistory = null;
  }

  private async refreshFacet(): Promise<void> {
    const handle = this.state.selection_handles[0];
    const spec = this.state.facet_spec;
    const ticket = this.fresh("facet");
    if (!handle || !spec) {
      this.data.facet = { result: null, alerts: [], constants: {} };
      return;
    }
    const [result, alerts] = await Promise.all([
      this.api.facet(handle, spec.x, spec.y, spec.color),
      this.api.alerts(handle),
    ]);
    if (!this.isCurrent("facet", ticket)) return;
    this.data.facet = { result, alerts, constants: alertConstants(alerts) };
  }

  private async reloadHistory(): Promise<void> {
    this.data.historyTree = await this.api.history();
  }

  private async commit(label: string): Promise<void> {
    this.state.label = label;
    await this.api.historyRecord({ ...this.state, grid_specs: [...this.state.grid_specs] });
    await this.reloadHistory();
  }

  // -- interactions (exactly one history record each) --------------------------

  /** Brush drag on the weekly overview; start/end swap when dragged backwards. */
  async setBrush(a: string, b: string): Promise<void> {
    const [start, end] = Date.parse(a) <= Date.parse(b) ? [a, b] : [b, a];
    this.state.brush_start = start;
    this.state.brush_end = end;
    this.state.grid_specs = this.deriveGridSpecs();
    await Promise.all([this.refreshGrids(), this.refreshGraph()]);
    await this.commit(`range ${start.slice(0, 10)} to ${end.slice(0, 10)}`);
    this.emit();
  }

  async setMode(mode: ConsoleMode): Promise<void> {
    this.visual.mode = mode;
    this.state.grid_specs = this.deriveGridSpecs();
    await this.refreshGrids();
    await this.commit(`${mode} mode`);
    this.emit();
  }

  async setFocusUser(user: string | null): Promise<void> {
    this.state.focus_user = user;
    this.state.grid_specs = this.deriveGridSpecs();
    await this.refreshGrids();
    await this.commit(user ? `focus ${user}` : "focus cleared");
    this.emit();
  }

  async setPolicyFilter(policyIds: string[]): Promise<void> {
    this.state.policy_filter = [...policyIds];
    this.state.grid_specs = this.deriveGridSpecs();
    await this.refreshGrids();
    await this.commit(policyIds.length ? `policies ${policyIds.join(",")}` : "all policies");
    this.emit();
  }

  /** Grid cell click: the cell's exact alert set flows into the facet plot. */
  async selectGridCell(handle: string): Promise<void> {
    this.state.selection_handles = [handle];
    await this.refreshFacet();
    const first = this.data.facet.alerts[0];
    const label = first ? `${first.events[0]?.user} @ ${first.alert_time}` : "empty selection";
    await this.commit(label);
    this.emit();
  }

  async setFacetAxes(x: string, y: string, color: string | null): Promise<void> {
    this.state.facet_spec = { x, y, color };
    await this.refreshFacet();
    await this.commit(`facet ${x} by ${y}`);
    this.emit();
  }

  /** Facet mark click: fill the detail panel and seed the relation graph. */
  async selectFacetAlert(alertId: string): Promise<void> {
    const alert = this.data.facet.alerts.find((a) => a.alert_id === alertId);
    if (!alert) return;
    this.data.detail = alert;
    this.state.graph_seed = alert.events[0]?.resource ?? null;
    this.state.graph_seed_kind = "resource";
    await this.refreshGraph();
    await this.commit(`${alert.events[0]?.user} @ ${alert.alert_time}`);
    this.emit();
  }

  async togglePermissive(): Promise<void> {
    this.state.permissive = !this.state.permissive;
    await this.refreshGraph();
    await this.commit(this.state.permissive ? "permissive matching on" : "permissive matching off");
    this.emit();
  }

  /** Node or edge selection populates the daily-history grid for the node. */
  async selectGraphNode(nodeId: string): Promise<void> {
    const query = this.graphQuery();
    if (!query) return;
    const ticket = this.fresh("nodeHistory");
    const result = await this.api.graphNodeHistory(query, nodeId);
    if (!this.isCurrent("nodeHistory", ticket)) return;
    this.data.nodeHistory = result;
    const node = this.data.graph?.nodes.find((n) => n.id === nodeId);
    await this.commit(`history of ${node?.label ?? nodeId}`);
    this.emit();
  }

  // -- history ------------------------------------------------------------------

  /** Restore never records; acting afterwards starts a new branch. */
  async restoreNode(nodeId: string): Promise<void> {
    const state = await this.api.historyRestore(nodeId);
    this.state = {
      ...state,
      grid_specs: state.grid_specs.map((s) => ({ ...s })),
      selection_handles: [...state.selection_handles],
      policy_filter: [...state.policy_filter],
      facet_spec: state.facet_spec ? { ...state.facet_spec } : null,
    };
    await Promise.all([this.refreshGrids(), this.refreshFacet(), this.refreshGraph()]);
    await this.reloadHistory();
    this.emit();
  }

  async annotate(nodeId: string, text: string): Promise<void> {
    await this.api.historyAnnotate(nodeId, text);
    await this.reloadHistory();
    this.emit();
  }

  // -- visual-only settings: never recorded -------------------------------------

  toggleCollapsed(panel: PanelName): void {
    this.visual.collapsed[panel] = !this.visual.collapsed[panel];
    this.emit();
  }

  setGraphLayout(layout: "force" | "regimented"): void {
    this.visual.graphLayout = layout;
    this.emit();
  }

  setRedacted(redacted: boolean): void {
    this.visual.redacted = redacted;
    this.emit();
  }
}
