import { displayUser } from "../redact";
import { clear, htmlEl, svgEl } from "../svg";
import type { GraphDto, GraphNodeDto } from "../types";

export interface GraphCallbacks {
  onNodeClick: (nodeId: string) => void;
  onEdgeClick: (user: string, resource: string) => void;
  onPermissiveToggle: () => void;
  onLayoutToggle: () => void;
}

const WIDTH = 640;
const HEIGHT = 420;

type Point = { x: number; y: number };

/** Regimented layout: rows and columns by node type, alphabetical — the
 * find-a-node-quickly mode. Node order comes straight from the API's
 * (kind, label) sort. */
function regimentedPositions(nodes: GraphNodeDto[]): Map<string, Point> {
  const positions = new Map<string, Point>();
  const byKind: Record<string, GraphNodeDto[]> = { resource: [], user: [] };
  for (const node of nodes) byKind[node.kind].push(node);
  const columns = 8;
  let y = 40;
  for (const kind of ["resource", "user"]) {
    const group = byKind[kind];
    group.forEach((node, i) => {
      positions.set(node.id, {
        x: 50 + (i % columns) * ((WIDTH - 80) / columns),
        y: y + Math.floor(i / columns) * 54,
      });
    });
    y += (Math.ceil(group.length / columns) || 1) * 54 + 40;
  }
  return positions;
}

/** Small custom relaxation; enough structure for desk-scale graphs without
 * pulling in a physics library. Deterministic. */
function forcePositions(graph: GraphDto): Map<string, Point> {
  const positions = new Map<string, Point>();
  graph.nodes.forEach((node, i) => {
    const angle = (2 * Math.PI * i) / Math.max(graph.nodes.length, 1);
    positions.set(node.id, {
      x: WIDTH / 2 + Math.cos(angle) * 150,
      y: HEIGHT / 2 + Math.sin(angle) * 150,
    });
  });
  for (let iter = 0; iter < 120; iter++) {
    for (const a of graph.nodes) {
      const pa = positions.get(a.id)!;
      let fx = 0;
      let fy = 0;
      for (const b of graph.nodes) {
        if (a.id === b.id) continue;
        const pb = positions.get(b.id)!;
        const dx = pa.x - pb.x;
        const dy = pa.y - pb.y;
        const d2 = Math.max(dx * dx + dy * dy, 25);
        fx += (dx / d2) * 1800;
        fy += (dy / d2) * 1800;
      }
      for (const edge of graph.edges) {
        const other =
          edge.user === a.id ? edge.resource : edge.resource === a.id ? edge.user : null;
        if (!other) continue;
        const pb = positions.get(other)!;
        fx += (pb.x - pa.x) * 0.02;
        fy += (pb.y - pa.y) * 0.02;
      }
      pa.x = Math.max(20, Math.min(WIDTH - 20, pa.x + fx * 0.4));
      pa.y = Math.max(20, Math.min(HEIGHT - 20, pa.y + fy * 0.4));
    }
  }
  return positions;
}

export function renderGraph(
  container: HTMLElement,
  graph: GraphDto | null,
  layout: "force" | "regimented",
  callbacks: GraphCallbacks,
  redacted = false
): void {
  clear(container);
  const controls = htmlEl("div", "graph-controls");
  const permissive = htmlEl("button", "permissive-toggle");
  permissive.textContent = graph?.permissive ? "permissive: on" : "permissive: off";
  permissive.addEventListener("click", callbacks.onPermissiveToggle);
  const layoutButton = htmlEl("button", "layout-toggle", `layout: ${layout}`);
  layoutButton.addEventListener("click", callbacks.onLayoutToggle);
  controls.append(permissive, layoutButton);
  container.appendChild(controls);

  if (!graph) {
    container.appendChild(htmlEl("p", "placeholder", "click a facet alert to seed the graph"));
    return;
  }

  const positions =
    layout === "regimented" ? regimentedPositions(graph.nodes) : forcePositions(graph);
  const height =
    layout === "regimented"
      ? Math.max(HEIGHT, 80 + (Math.max(...[...positions.values()].map((p) => p.y)) || 0))
      : HEIGHT;
  const svg = svgEl("svg", { class: "graph-plot", width: WIDTH, height });

  const incident = new Map<string, Set<Element>>();
  const nodeEls = new Map<string, Element>();
  const touch = (id: string, el: Element) => {
    if (!incident.has(id)) incident.set(id, new Set());
    incident.get(id)!.add(el);
  };

  for (const edge of graph.edges) {
    const a = positions.get(edge.user);
    const b = positions.get(edge.resource);
    if (!a || !b) continue;
    const line = svgEl("line", {
      class: "graph-edge",
      x1: a.x,
      y1: a.y,
      x2: b.x,
      y2: b.y,
      "stroke-width": 1 + 2 * Math.log10(edge.alert_count + 1),
    });
    line.dataset.user = edge.user;
    line.dataset.resource = edge.resource;
    const tip = svgEl("title");
    tip.textContent = `${edge.alert_count} alert(s)`;
    line.appendChild(tip);
    line.addEventListener("click", () => callbacks.onEdgeClick(edge.user, edge.resource));
    line.addEventListener("mouseenter", () => {
      line.classList.add("hl");
      incident.get(edge.user)?.forEach((el) => el.classList.add("hl"));
      incident.get(edge.resource)?.forEach((el) => el.classList.add("hl"));
    });
    line.addEventListener("mouseleave", () => {
      svg.querySelectorAll(".hl").forEach((el) => el.classList.remove("hl"));
    });
    touch(edge.user, line);
    touch(edge.resource, line);
    svg.appendChild(line);
  }

  for (const node of graph.nodes) {
    const p = positions.get(node.id)!;
    const r = 5 + node.size_scale * 6; // log-scaled size from the API
    const group = svgEl("g", {
      class: `graph-node kind-${node.kind}` + (node.id === graph.seed ? " seed" : ""),
      transform: `translate(${p.x}, ${p.y})`,
    });
    group.dataset.nodeId = node.id;
    // redundant type encoding: shape and colour
    group.appendChild(
      node.kind === "user"
        ? svgEl("circle", { r, class: "node-shape user" })
        : svgEl("rect", { x: -r, y: -r, width: 2 * r, height: 2 * r, rx: 2, class: "node-shape resource" })
    );
    const text = svgEl("text", { y: r + 12, class: "node-label" });
    text.textContent = node.kind === "user" ? displayUser(node.label, redacted) : node.label;
    group.appendChild(text);
    const tip = svgEl("title");
    tip.textContent =
      `${node.label}: ${node.alert_count} alert(s)` +
      (node.members && node.members.length > 1 ? `\nmembers:\n${node.members.join("\n")}` : "");
    group.appendChild(tip);
    group.addEventListener("click", () => callbacks.onNodeClick(node.id));
    group.addEventListener("mouseenter", () => {
      group.classList.add("hl");
      incident.get(node.id)?.forEach((el) => {
        el.classList.add("hl");
        const other = (el as SVGElement).dataset.user === node.id
          ? (el as SVGElement).dataset.resource
          : (el as SVGElement).dataset.user;
        if (other) nodeEls.get(other)?.classList.add("hl");
      });
    });
    group.addEventListener("mouseleave", () => {
      svg.querySelectorAll(".hl").forEach((el) => el.classList.remove("hl"));
    });
    touch(node.id, group);
    nodeEls.set(node.id, group);
    svg.appendChild(group);
  }
  container.appendChild(svg);
}
