import { beforeEach, describe, expect, it, vi } from "vitest";

import { redactUser } from "../src/redact";
import { renderFacet } from "../src/views/facet";
import { renderGraph } from "../src/views/graph";
import { renderGrid } from "../src/views/grids";
import { renderHistory } from "../src/views/history";
import { renderOverview } from "../src/views/overview";
import type { GraphDto, HistoryTreeDto } from "../src/types";
import { CELL_ALERTS, MockApi } from "./mock_api";
import { alertConstants } from "../src/state";

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "";
  root = document.createElement("div");
  document.body.appendChild(root);
});

describe("overview", () => {
  it("renders one bar per week plus the brush window", () => {
    renderOverview(
      root,
      [
        { week_start: "2021-03-01", alert_count: 4 },
        { week_start: "2021-03-08", alert_count: 2 },
      ],
      { start: "2021-03-01T00:00:00Z", end: "2021-03-10T00:00:00Z" },
      { onBrush: () => {} }
    );
    expect(root.querySelectorAll(".week-bar")).toHaveLength(2);
    expect(root.querySelector(".brush-window")).not.toBeNull();
  });
});

describe("grid rendering", () => {
  it("fires the cell callback with the clicked cell", async () => {
    const api = new MockApi();
    const grid = await api.grid({ view: "Calendar", start: "", end: "" });
    const onCellClick = vi.fn();
    renderGrid(root, grid, { onCellClick });
    (root.querySelector(".grid-cell") as SVGGElement).dispatchEvent(
      new MouseEvent("click", { bubbles: true })
    );
    expect(onCellClick).toHaveBeenCalledWith(grid.cells[0]);
  });

  it("zero-count cells carry no bar", async () => {
    const api = new MockApi();
    const grid = await api.grid({ view: "TwentyFourHoursByPolicy", start: "", end: "" });
    renderGrid(root, grid, { onCellClick: () => {} });
    const empty = root.querySelectorAll(".grid-cell.empty");
    expect(empty.length).toBeGreaterThan(0);
    for (const cell of empty) {
      expect(cell.querySelector(".cell-bar")).toBeNull();
    }
  });

  it("keeps the API's severity row order, most severe first", async () => {
    const api = new MockApi();
    const grid = await api.grid({ view: "TwentyFourHoursByPolicy", start: "", end: "" });
    renderGrid(root, grid, { onCellClick: () => {} });
    const labels = [...root.querySelectorAll("tr.policy-row th")].map((el) => el.textContent);
    expect(labels).toEqual(["pol-usb-watch", "pol-cloud-backup"]);
  });

  it("renders the totals row and column for the by-policy matrix", async () => {
    const api = new MockApi();
    const grid = await api.grid({ view: "DailyTopUsersByPolicy", start: "", end: "" });
    renderGrid(root, grid, { onCellClick: () => {} });
    const firstRow = root.querySelector("table.grid-matrix tr:nth-child(2)");
    expect(firstRow?.classList.contains("totals")).toBe(true);
    expect(root.querySelectorAll("th.totals").length).toBeGreaterThan(0);
  });

  it("redacts user ids when asked", async () => {
    const api = new MockApi();
    const grid = await api.grid({ view: "DailyTopUsersByPolicy", start: "", end: "" });
    renderGrid(root, grid, { onCellClick: () => {} }, true);
    expect(root.textContent).not.toContain("u001");
    expect(root.textContent).toContain(redactUser("u001"));
  });
});

describe("facet rendering", () => {
  async function facetData(color: string | null = null) {
    const api = new MockApi();
    const result = await api.facet("h-docs-day", "resource_type", "resource", color);
    const alerts = CELL_ALERTS["h-docs-day"];
    return { result, alerts, constants: alertConstants(alerts) };
  }

  it("draws one mark per alert, grouped", async () => {
    renderFacet(root, await facetData(), { x: "resource_type", y: "resource", color: null }, null, {
      onAlertClick: () => {},
      onAxesChange: () => {},
    });
    expect(root.querySelectorAll(".facet-mark")).toHaveLength(3);
    expect(root.querySelectorAll(".facet-group")).toHaveLength(2); // deck vs notes
  });

  it("clicking a mark reports the alert id; tooltip carries details", async () => {
    const onAlertClick = vi.fn();
    renderFacet(root, await facetData(), { x: "resource_type", y: "resource", color: null }, null, {
      onAlertClick,
      onAxesChange: () => {},
    });
    const mark = root.querySelector(".facet-mark") as SVGCircleElement;
    expect(mark.querySelector("title")?.textContent).toContain("pol-cloud-backup");
    mark.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(onAlertClick).toHaveBeenCalledWith("b1");
  });

  it("lists alert constants and the selected alert's details", async () => {
    const data = await facetData();
    renderFacet(root, data, { x: "resource_type", y: "resource", color: null }, data.alerts[0], {
      onAlertClick: () => {},
      onAxesChange: () => {},
    });
    expect(root.querySelector(".constants-tab")?.textContent).toContain("pol-cloud-backup");
    expect(root.querySelector(".detail-text")?.textContent).toContain("u002");
  });

  it("categorical colouring never paints a red hue", async () => {
    renderFacet(
      root,
      await facetData("resource"),
      { x: "resource_type", y: "resource", color: "resource" },
      null,
      { onAlertClick: () => {}, onAxesChange: () => {} }
    );
    for (const mark of root.querySelectorAll(".facet-mark")) {
      const hue = Number(/hsl\((\d+)/.exec(mark.getAttribute("fill")!)![1]);
      expect(hue).toBeGreaterThan(25);
      expect(hue).toBeLessThan(330);
    }
  });
});

describe("graph rendering", () => {
  let graph: GraphDto;

  beforeEach(async () => {
    const api = new MockApi();
    graph = await api.graph({ seed: "u001", kind: "user", start: "", end: "", permissive: true });
  });

  const callbacks = {
    onNodeClick: () => {},
    onEdgeClick: () => {},
    onPermissiveToggle: () => {},
    onLayoutToggle: () => {},
  };

  it("renders every node and edge with shape by kind", () => {
    renderGraph(root, graph, "regimented", callbacks);
    expect(root.querySelectorAll(".graph-node")).toHaveLength(graph.nodes.length);
    expect(root.querySelectorAll(".graph-edge")).toHaveLength(graph.edges.length);
    expect(root.querySelectorAll(".node-shape.user")).toHaveLength(3);
    expect(root.querySelectorAll(".node-shape.resource")).toHaveLength(3);
  });

  it("regimented layout keeps the API's (kind, label) order", () => {
    renderGraph(root, graph, "regimented", callbacks);
    const ids = [...root.querySelectorAll(".graph-node")].map(
      (el) => (el as SVGGElement).dataset.nodeId
    );
    const expected = [...graph.nodes]
      .sort((a, b) => (a.kind + a.label).localeCompare(b.kind + b.label))
      .map((n) => n.id);
    expect(ids).toEqual(expected);
  });

  it("hovering a node highlights incident edges and neighbours", () => {
    renderGraph(root, graph, "regimented", callbacks);
    const node = root.querySelector('[data-node-id="u:u007"]') as SVGGElement;
    node.dispatchEvent(new MouseEvent("mouseenter"));
    const litEdges = [...root.querySelectorAll(".graph-edge.hl")];
    expect(litEdges).toHaveLength(1);
    expect((litEdges[0] as SVGElement).dataset.resource).toBe("r:usb-vol:{g1}");
    node.dispatchEvent(new MouseEvent("mouseleave"));
    expect(root.querySelectorAll(".hl")).toHaveLength(0);
  });

  it("permissive toggle button reflects and reports state", () => {
    const onPermissiveToggle = vi.fn();
    renderGraph(root, graph, "regimented", { ...callbacks, onPermissiveToggle });
    const button = root.querySelector(".permissive-toggle") as HTMLButtonElement;
    expect(button.textContent).toBe("permissive: on");
    button.click();
    expect(onPermissiveToggle).toHaveBeenCalledOnce();
  });

  it("merged permissive nodes expose their member descriptors", () => {
    renderGraph(root, graph, "regimented", callbacks);
    const merged = root.querySelector('[data-node-id="r:usb-vol:{g1}"] title');
    expect(merged?.textContent).toContain("usb-vol:{g1};{ga}");
  });
});

describe("history rendering", () => {
  function tree(): HistoryTreeDto {
    const state = (label: string) => ({
      label,
      brush_start: null,
      brush_end: null,
      grid_specs: [],
      selection_handles: [],
      facet_spec: null,
      graph_seed: null,
      graph_seed_kind: null,
      permissive: false,
      policy_filter: [],
      focus_user: null,
      exclusion_epoch: 0,
    });
    return {
      nodes: [
        { node_id: "n1", parent_id: null, state: state("start"), created_at: 1, annotation: null },
        { node_id: "n2", parent_id: "n1", state: state("first path"), created_at: 2, annotation: "keep" },
        { node_id: "n3", parent_id: "n1", state: state("second path"), created_at: 3, annotation: null },
      ],
      cursor: "n3",
    };
  }

  it("shows branch tabs at divergence points and follows the cursor's branch", () => {
    renderHistory(root, tree(), { onRestore: () => {}, onAnnotate: () => {} });
    const tabs = [...root.querySelectorAll(".branch-tab")];
    expect(tabs).toHaveLength(2);
    expect(tabs[1].classList.contains("active")).toBe(true);
    expect(root.textContent).toContain("second path");
    expect(root.textContent).not.toContain("first path");
  });

  it("switching tabs reveals the other branch", () => {
    renderHistory(root, tree(), { onRestore: () => {}, onAnnotate: () => {} });
    (root.querySelectorAll(".branch-tab")[0] as HTMLButtonElement).click();
    expect(root.textContent).toContain("first path");
    expect(root.querySelector(".annotation")?.textContent).toBe("keep");
  });

  it("restore buttons call back with the node id", () => {
    const onRestore = vi.fn();
    renderHistory(root, tree(), { onRestore, onAnnotate: () => {} });
    (root.querySelector(".history-entry .restore") as HTMLButtonElement).click();
    expect(onRestore).toHaveBeenCalledWith("n1");
  });
});
