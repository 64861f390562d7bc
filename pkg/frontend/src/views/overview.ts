import { cellColor } from "../color";
import { clear, svgEl } from "../svg";
import type { HistogramBucket } from "../types";

export interface OverviewCallbacks {
  onBrush: (startIso: string, endIso: string) => void;
}

const WIDTH = 960;
const HEIGHT = 80;
const WEEK_MS = 7 * 86_400_000;

/** Weekly overview histogram with a drag brush that zooms and filters the
 * rest of the console. */
export function renderOverview(
  container: HTMLElement,
  buckets: HistogramBucket[],
  brush: { start: string | null; end: string | null },
  callbacks: OverviewCallbacks
): void {
  clear(container);
  if (!buckets.length) {
    container.appendChild(document.createTextNode("no data loaded"));
    return;
  }
  const svg = svgEl("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    class: "overview-chart",
    width: "100%",
    height: HEIGHT,
  });
  const max = Math.max(...buckets.map((b) => b.alert_count), 1);
  const barWidth = WIDTH / buckets.length;
  const t0 = Date.parse(buckets[0].week_start + "T00:00:00Z");

  const xOfIso = (iso: string) => ((Date.parse(iso) - t0) / (buckets.length * WEEK_MS)) * WIDTH;
  const isoOfX = (x: number) => {
    const ms = t0 + (Math.max(0, Math.min(WIDTH, x)) / WIDTH) * buckets.length * WEEK_MS;
    return new Date(Math.round(ms / WEEK_MS) * WEEK_MS).toISOString().slice(0, 19) + "Z";
  };

  buckets.forEach((bucket, i) => {
    const h = Math.max(1, (bucket.alert_count / max) * (HEIGHT - 4));
    const bar = svgEl("rect", {
      class: "week-bar",
      x: i * barWidth + 0.5,
      y: HEIGHT - h,
      width: Math.max(1, barWidth - 1),
      height: h,
      fill: cellColor(bucket.alert_count, max),
    });
    bar.appendChild(svgEl("title"));
    bar.querySelector("title")!.textContent = `${bucket.week_start}: ${bucket.alert_count}`;
    svg.appendChild(bar);
  });

  if (brush.start && brush.end) {
    svg.appendChild(
      svgEl("rect", {
        class: "brush-window",
        x: xOfIso(brush.start),
        y: 0,
        width: Math.max(2, xOfIso(brush.end) - xOfIso(brush.start)),
        height: HEIGHT,
      })
    );
  }

  // drag anywhere on the chart to set the range; backwards drags are fine,
  // the console normalises them by swapping
  const surface = svgEl("rect", {
    class: "brush-surface",
    x: 0,
    y: 0,
    width: WIDTH,
    height: HEIGHT,
    fill: "transparent",
  });
  let dragFrom: number | null = null;
  const localX = (event: MouseEvent) => {
    const box = (svg as SVGSVGElement).getBoundingClientRect();
    const scale = box.width > 0 ? WIDTH / box.width : 1;
    return (event.clientX - box.left) * scale;
  };
  surface.addEventListener("mousedown", (event) => {
    dragFrom = localX(event as MouseEvent);
  });
  surface.addEventListener("mouseup", (event) => {
    if (dragFrom === null) return;
    const from = dragFrom;
    dragFrom = null;
    const to = localX(event as MouseEvent);
    if (Math.abs(to - from) < 2) return; // a click, not a drag
    callbacks.onBrush(isoOfX(from), isoOfX(to));
  });
  svg.appendChild(surface);
  container.appendChild(svg);
}
