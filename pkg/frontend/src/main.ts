import { HttpApiClient } from "./api";
import { Console } from "./state";
import { clear, htmlEl } from "./svg";
import type { PanelName } from "./types";
import { renderFacet } from "./views/facet";
import { renderGraph } from "./views/graph";
import { renderGrid, renderGridPanel } from "./views/grids";
import { renderHistory } from "./views/history";
import { renderOverview } from "./views/overview";

function panel(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing panel #${id}`);
  return el;
}

export function wire(console_: Console): () => void {
  const overview = panel("overview-body");
  const grids = panel("grids-body");
  const facet = panel("facet-body");
  const graph = panel("graph-body");
  const nodeHistory = panel("node-history-body");
  const history = panel("history-body");

  const render = () => {
    const { state, visual, data } = console_;
    document.querySelectorAll<HTMLElement>("[data-panel]").forEach((section) => {
      const name = section.dataset.panel as PanelName;
      section.classList.toggle("collapsed", visual.collapsed[name]);
    });

    if (!visual.collapsed.overview) {
      renderOverview(
        overview,
        data.histogram,
        { start: state.brush_start, end: state.brush_end },
        { onBrush: (a, b) => void console_.setBrush(a, b) }
      );
    }
    if (!visual.collapsed.grids) {
      renderGridPanel(
        grids,
        data.grids,
        { onCellClick: (cell) => void console_.selectGridCell(cell.handle) },
        visual.redacted
      );
    }
    if (!visual.collapsed.facet) {
      renderFacet(
        facet,
        data.facet,
        state.facet_spec,
        data.detail,
        {
          onAlertClick: (id) => void console_.selectFacetAlert(id),
          onAxesChange: (x, y, color) => void console_.setFacetAxes(x, y, color),
        },
        visual.redacted
      );
    }
    if (!visual.collapsed.graph) {
      renderGraph(
        graph,
        data.graph,
        visual.graphLayout,
        {
          onNodeClick: (id) => void console_.selectGraphNode(id),
          onEdgeClick: (user) => void console_.selectGraphNode(user),
          onPermissiveToggle: () => void console_.togglePermissive(),
          onLayoutToggle: () =>
            console_.setGraphLayout(visual.graphLayout === "force" ? "regimented" : "force"),
        },
        visual.redacted
      );
      clear(nodeHistory);
      if (data.nodeHistory) {
        renderGrid(
          nodeHistory,
          data.nodeHistory,
          { onCellClick: (cell) => void console_.selectGridCell(cell.handle) },
          visual.redacted
        );
      }
    }
    if (!visual.collapsed.history) {
      renderHistory(history, data.historyTree, {
        onRestore: (id) => void console_.restoreNode(id),
        onAnnotate: (id, text) => void console_.annotate(id, text),
      });
    }
  };

  console_.subscribe(render);

  for (const section of document.querySelectorAll<HTMLElement>("[data-panel]")) {
    const name = section.dataset.panel as PanelName;
    const button = section.querySelector<HTMLButtonElement>(".collapse-toggle");
    button?.addEventListener("click", () => console_.toggleCollapsed(name));
  }
  const modeSelect = document.getElementById("mode-select") as HTMLSelectElement | null;
  modeSelect?.addEventListener("change", () =>
    void console_.setMode(modeSelect.value === "daily" ? "daily" : "historic")
  );
  const redact = document.getElementById("redact-toggle") as HTMLInputElement | null;
  redact?.addEventListener("change", () => console_.setRedacted(!!redact.checked));
  const focus = document.getElementById("focus-user") as HTMLInputElement | null;
  focus?.addEventListener("change", () => void console_.setFocusUser(focus.value || null));
  const policies = document.getElementById("policy-filter") as HTMLInputElement | null;
  policies?.addEventListener("change", () =>
    void console_.setPolicyFilter(policies.value ? policies.value.split(",").map((s) => s.trim()) : [])
  );
  return render;
}

async function boot(): Promise<void> {
  const api = new HttpApiClient("");
  const console_ = new Console(api);
  wire(console_);
  try {
    await console_.init();
  } catch (error) {
    const banner = htmlEl("div", "error-banner", `failed to reach the API: ${String(error)}`);
    document.body.prepend(banner);
  }
}

if (typeof document !== "undefined" && document.getElementById("overview-body")) {
  void boot();
}
