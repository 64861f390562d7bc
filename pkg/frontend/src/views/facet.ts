import { categoricalColor, continuousColor, normalise } from "../color";
import { displayUser } from "../redact";
import { clear, htmlEl, svgEl } from "../svg";
import type { FacetPanelData } from "../state";
import type { AlertDto } from "../types";

export interface FacetCallbacks {
  onAlertClick: (alertId: string) => void;
  onAxesChange: (x: string, y: string, color: string | null) => void;
}

export const FACET_AXES = [
  "user", "policy", "resource", "resource_type", "activity",
  "endpoint", "application", "alert_hour", "event_count",
];
export const COLOR_AXES = [...FACET_AXES, "severity", "alert_time"];

const GROUP = 64;
const MARK = 7;

function axisSelect(name: string, options: string[], value: string | null, allowNone: boolean): HTMLSelectElement {
  const select = htmlEl("select");
  select.name = name;
  if (allowNone) {
    const none = htmlEl("option", "", "none");
    none.value = "";
    select.appendChild(none);
  }
  for (const option of options) {
    const el = htmlEl("option", "", option);
    el.value = option;
    if (option === value) el.selected = true;
    select.appendChild(el);
  }
  return select;
}

/** Categorical scatterplot: alerts grouped by two chosen attributes, an
 * optional third driving colour, plus tooltip, detail text and the alert
 * constants tab. */
export function renderFacet(
  container: HTMLElement,
  facet: FacetPanelData,
  spec: { x: string; y: string; color: string | null } | null,
  detail: AlertDto | null,
  callbacks: FacetCallbacks,
  redacted = false
): void {
  clear(container);
  const controls = htmlEl("div", "facet-controls");
  const xSel = axisSelect("x", FACET_AXES, spec?.x ?? "policy", false);
  const ySel = axisSelect("y", FACET_AXES, spec?.y ?? "user", false);
  const cSel = axisSelect("color", COLOR_AXES, spec?.color ?? null, true);
  const apply = () => callbacks.onAxesChange(xSel.value, ySel.value, cSel.value || null);
  for (const sel of [xSel, ySel, cSel]) sel.addEventListener("change", apply);
  controls.append("x:", xSel, " y:", ySel, " colour:", cSel);
  container.appendChild(controls);

  const result = facet.result;
  if (!result) {
    container.appendChild(htmlEl("p", "placeholder", "select a grid cell to load alerts"));
    return;
  }

  const xValues = [...new Set(result.groups.map((g) => g.x))].sort();
  const yValues = [...new Set(result.groups.map((g) => g.y))].sort();
  const svg = svgEl("svg", {
    class: "facet-plot",
    width: (xValues.length + 1) * GROUP,
    height: (yValues.length + 1) * GROUP,
  });

  // colour assignment: graduated single hue for continuous, desaturated
  // cycle (never red) for categorical
  const colorOf = new Map<string, string>();
  if (result.color_kind === "continuous") {
    const ids = Object.keys(result.colors);
    const ts = normalise(ids.map((id) => result.colors[id]));
    ids.forEach((id, i) => colorOf.set(id, continuousColor(ts[i])));
  } else if (result.color_kind === "categorical") {
    const values = [...new Set(Object.values(result.colors))].sort();
    const index = new Map(values.map((v, i) => [v, i]));
    for (const [id, value] of Object.entries(result.colors)) {
      colorOf.set(id, categoricalColor(index.get(value) ?? 0));
    }
  }

  for (const [xi, x] of xValues.entries()) {
    const label = svgEl("text", { x: (xi + 1) * GROUP + GROUP / 2, y: 14, class: "axis-label" });
    label.textContent = spec?.x === "user" ? displayUser(x, redacted) : x;
    svg.appendChild(label);
  }
  for (const [yi, y] of yValues.entries()) {
    const label = svgEl("text", { x: 4, y: (yi + 1) * GROUP + GROUP / 2, class: "axis-label" });
    label.textContent = spec?.y === "user" ? displayUser(y, redacted) : y;
    svg.appendChild(label);
  }

  const perRow = Math.floor((GROUP - MARK) / (MARK + 1));
  for (const group of result.groups) {
    const gx = (xValues.indexOf(group.x) + 1) * GROUP;
    const gy = (yValues.indexOf(group.y) + 1) * GROUP;
    const cellGroup = svgEl("g", { class: "facet-group", transform: `translate(${gx}, ${gy})` });
    group.alert_ids.forEach((alertId, k) => {
      const mark = svgEl("circle", {
        class: "facet-mark",
        cx: MARK + (k % perRow) * (MARK + 1),
        cy: MARK + Math.floor(k / perRow) * (MARK + 1),
        r: MARK / 2,
        fill: colorOf.get(alertId) ?? "hsl(211, 30%, 60%)",
      });
      mark.dataset.alertId = alertId;
      const alert = facet.alerts.find((a) => a.alert_id === alertId);
      if (alert) {
        const tip = svgEl("title");
        tip.textContent =
          `${displayUser(alert.events[0]?.user ?? "", redacted)} ${alert.alert_time}\n` +
          `${alert.policy_id} severity ${alert.severity}\n` +
          `${alert.events[0]?.application} ${alert.events[0]?.resource}\n` +
          `${alert.events.length} event(s)`;
        mark.appendChild(tip);
      }
      mark.addEventListener("click", () => callbacks.onAlertClick(alertId));
      cellGroup.appendChild(mark);
    });
    svg.appendChild(cellGroup);
  }
  container.appendChild(svg);

  const tabs = htmlEl("div", "facet-tabs");
  const constantsTab = htmlEl("div", "constants-tab");
  constantsTab.appendChild(htmlEl("h4", "", "Alert constants"));
  const list = htmlEl("dl");
  for (const [attr, value] of Object.entries(facet.constants)) {
    list.appendChild(htmlEl("dt", "", attr));
    const shown = attr === "user" ? displayUser(String(value), redacted) : String(value);
    list.appendChild(htmlEl("dd", "", shown));
  }
  constantsTab.appendChild(list);
  tabs.appendChild(constantsTab);

  const detailPanel = htmlEl("div", "detail-panel");
  detailPanel.appendChild(htmlEl("h4", "", "Selected alert"));
  if (detail) {
    const first = detail.events[0];
    detailPanel.appendChild(
      htmlEl(
        "pre",
        "detail-text",
        [
          `user        ${displayUser(first?.user ?? "", redacted)}`,
          `time        ${detail.alert_time}`,
          `policy      ${detail.policy_id} (severity ${detail.severity})`,
          `endpoint    ${first?.endpoint}`,
          `application ${first?.application}`,
          `resource    ${first?.resource}`,
          `activity    ${first?.activity}`,
          `events      ${detail.events.length}`,
        ].join("\n")
      )
    );
  } else {
    detailPanel.appendChild(htmlEl("p", "placeholder", "click an alert mark for details"));
  }
  tabs.appendChild(detailPanel);
  container.appendChild(tabs);
}
