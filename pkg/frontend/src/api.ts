import type {
  AlertDto,
  ExplorationState,
  FacetResultDto,
  GraphDto,
  GraphQuery,
  GridQuery,
  GridResultDto,
  HistogramBucket,
  HistoryTreeDto,
  Meta,
} from "./types";

// Everything the console needs from the backend; the mock in tests/
// implements the same surface.
export interface ApiClient {
  meta(): Promise<Meta>;
  histogram(): Promise<HistogramBucket[]>;
  grid(query: GridQuery): Promise<GridResultDto>;
  alerts(handle: string): Promise<AlertDto[]>;
  facet(handle: string, x: string, y: string, color?: string | null): Promise<FacetResultDto>;
  graph(query: GraphQuery): Promise<GraphDto>;
  graphNodeHistory(query: GraphQuery, node: string): Promise<GridResultDto>;
  newSession(): Promise<string>;
  history(): Promise<HistoryTreeDto>;
  historyRecord(state: ExplorationState): Promise<string>;
  historyRestore(nodeId: string): Promise<ExplorationState>;
  historyAnnotate(nodeId: string, text: string): Promise<void>;
}

export class HttpApiClient implements ApiClient {
  private sessionId: string | null = null;

  constructor(private base: string = "") {}

  private async get<T>(path: string, params?: Record<string, string | number | boolean | undefined>): Promise<T> {
    const url = new URL(this.base + path, window.location.origin);
    for (const [key, value] of Object.entries(params ?? {})) {
      if (value !== undefined) url.searchParams.set(key, String(value));
    }
    const response = await fetch(url.toString(), { headers: this.headers() });
    if (!response.ok) throw new Error(`${path}: ${response.status} ${await response.text()}`);
    return response.json() as Promise<T>;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json", ...this.headers() },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw new Error(`${path}: ${response.status} ${await response.text()}`);
    return response.json() as Promise<T>;
  }

  private headers(): Record<string, string> {
    return this.sessionId ? { "X-Session-Id": this.sessionId } : {};
  }

  meta() {
    return this.get<Meta>("/api/meta");
  }

  histogram() {
    return this.get<HistogramBucket[]>("/api/histogram");
  }

  grid(query: GridQuery) {
    return this.get<GridResultDto>("/api/grid", {
      view: query.view,
      start: query.start,
      end: query.end,
      user: query.user,
      policies: query.policies?.join(","),
      resources: query.resources?.join("|"),
      top_n: query.top_n,
    });
  }

  alerts(handle: string) {
    return this.get<AlertDto[]>("/api/alerts", { handle });
  }

  facet(handle: string, x: string, y: string, color?: string | null) {
    return this.get<FacetResultDto>("/api/facet", { handle, x, y, color: color ?? undefined });
  }

  graph(query: GraphQuery) {
    return this.get<GraphDto>("/api/graph", { ...query });
  }

  graphNodeHistory(query: GraphQuery, node: string) {
    return this.get<GridResultDto>("/api/graph/history", { ...query, node });
  }

  async newSession() {
    const body = await this.post<{ session_id: string }>("/api/session", {});
    this.sessionId = body.session_id;
    return body.session_id;
  }

  history() {
    return this.get<HistoryTreeDto>("/api/history");
  }

  async historyRecord(state: ExplorationState) {
    const body = await this.post<{ node_id: string }>("/api/history/record", { state });
    return body.node_id;
  }

  async historyRestore(nodeId: string) {
    const body = await this.post<{ state: ExplorationState }>("/api/history/restore", {
      node_id: nodeId,
    });
    return body.state;
  }

  async historyAnnotate(nodeId: string, text: string) {
    await this.post("/api/history/annotate", { node_id: nodeId, text });
  }
}
