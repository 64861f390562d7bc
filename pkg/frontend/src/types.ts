// Wire DTOs for the analytics API plus the console's own state shapes.

export interface Meta {
  total_alerts: number;
  stored_alerts: number;
  range: { start: string | null; end: string | null };
  policies: { policy_id: string; severity: number }[];
}

export interface HistogramBucket {
  week_start: string; // ISO date of the Monday
  alert_count: number;
}

export type GridViewName =
  | "Calendar"
  | "DailyTopUsers"
  | "HistoricTopUsers"
  | "SingleUserCalendar"
  | "DailyTopUsersByPolicy"
  | "TwentyFourHoursByPolicy"
  | "TargetedCalendar";

export interface GridQuery {
  view: GridViewName;
  start: string;
  end: string;
  user?: string;
  policies?: string[];
  resources?: string[];
  top_n?: number;
}

export interface GridCellDto {
  row: string;
  col: string | null;
  count: number;
  handle: string;
}

export interface GridResultDto {
  view: GridViewName;
  rows: string[];
  cols: string[] | null;
  cells: GridCellDto[];
  meta: { ordering?: string; row_severity?: Record<string, number>; node?: string };
}

export interface EventDto {
  event_id: string;
  user: string;
  endpoint: string;
  application: string;
  resource: string;
  resource_type: string;
  activity: string;
  start_time: string;
  end_time: string;
}

export interface AlertDto {
  alert_id: string;
  alert_time: string;
  policy_id: string;
  severity: number;
  events: EventDto[];
}

export interface FacetGroupDto {
  x: string;
  y: string;
  alert_ids: string[];
}

export interface FacetResultDto {
  groups: FacetGroupDto[];
  color_attr: string | null;
  color_kind: "categorical" | "continuous" | null;
  colors: Record<string, string | number>;
}

export interface GraphNodeDto {
  id: string;
  kind: "user" | "resource";
  label: string;
  alert_count: number;
  size_scale: number;
  members?: string[];
}

export interface GraphEdgeDto {
  user: string;
  resource: string;
  alert_count: number;
}

export interface GraphDto {
  nodes: GraphNodeDto[];
  edges: GraphEdgeDto[];
  seed: string;
  permissive: boolean;
  range: { start: string; end: string };
}

export interface GraphQuery {
  seed: string;
  kind: "user" | "resource";
  start: string;
  end: string;
  permissive: boolean;
}

export interface HistoryNodeDto {
  node_id: string;
  parent_id: string | null;
  state: ExplorationState;
  created_at: number;
  annotation: string | null;
}

export interface HistoryTreeDto {
  nodes: HistoryNodeDto[];
  cursor: string | null;
}

// The data-bearing snapshot recorded into history; must round-trip through
// record/restore untouched. Purely visual settings live in VisualState and
// never enter history.
export interface ExplorationState {
  label: string;
  brush_start: string | null;
  brush_end: string | null;
  grid_specs: GridQuery[];
  selection_handles: string[];
  facet_spec: { x: string; y: string; color: string | null } | null;
  graph_seed: string | null;
  graph_seed_kind: "user" | "resource" | null;
  permissive: boolean;
  policy_filter: string[];
  focus_user: string | null;
  exclusion_epoch: number;
}

export type PanelName = "overview" | "grids" | "facet" | "graph" | "history";

export type ConsoleMode = "daily" | "historic";

export interface VisualState {
  collapsed: Record<PanelName, boolean>;
  graphLayout: "force" | "regimented";
  redacted: boolean;
  mode: ConsoleMode;
}
