/** Interactive class-distribution chart: pie (default) with a bar toggle.
 *
 * Segments are keyboard-reachable buttons; clicking one selects its class,
 * clicking the selected one again clears the filter. The selected segment is
 * visually distinguished, and a legend with class names is always shown. */

import { classLabel } from "./classNames";

export type ChartMode = "pie" | "bar";

export interface ChartOptions {
  selected: number | null;
  mode: ChartMode;
  onSelect: (classId: number) => void;
}

const PALETTE = [
  "#3466a5", "#5a88c0", "#7faad8", "#a6c7e8", "#2a9d8f", "#57b8ac", "#83d3c9",
  "#e9c46a", "#f4a261", "#e76f51", "#c0565f", "#9c89b8", "#b8a1d9", "#6d9f71",
  "#90bb94", "#c2d6a4", "#d98f6e", "#8d99ae", "#5f7470",
];

export function segmentColor(classId: number): string {
  return PALETTE[classId % PALETTE.length]!;
}

function polar(cx: number, cy: number, radius: number, angle: number): [number, number] {
  return [cx + radius * Math.sin(angle), cy - radius * Math.cos(angle)];
}

function entries(distribution: Record<string, number>): [number, number][] {
  return Object.entries(distribution)
    .map(([cid, count]) => [Number(cid), count] as [number, number])
    .filter(([, count]) => count > 0)
    .sort((a, b) => a[0] - b[0]);
}

function interactive(el: Element, classId: number, onSelect: (classId: number) => void): void {
  el.setAttribute("role", "button");
  el.setAttribute("tabindex", "0");
  el.setAttribute("data-class-id", String(classId));
  el.addEventListener("click", () => onSelect(classId));
  el.addEventListener("keydown", (event) => {
    const key = (event as KeyboardEvent).key;
    if (key === "Enter" || key === " ") {
      event.preventDefault();
      onSelect(classId);
    }
  });
}

const SVG_NS = "http://www.w3.org/2000/svg";
const SIZE = 280;

function renderPie(
  container: HTMLElement,
  dist: [number, number][],
  options: ChartOptions,
): void {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${SIZE} ${SIZE}`);
  svg.setAttribute("class", "pie-chart");
  const total = dist.reduce((acc, [, count]) => acc + count, 0);
  const cx = SIZE / 2;
  const cy = SIZE / 2;
  const radius = SIZE / 2 - 6;

  if (dist.length === 1) {
    const [classId] = dist[0]!;
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(cx));
    circle.setAttribute("cy", String(cy));
    circle.setAttribute("r", String(radius));
    circle.setAttribute("fill", segmentColor(classId));
    circle.setAttribute("class", segmentClass(classId, options.selected));
    interactive(circle, classId, options.onSelect);
    svg.append(circle);
  } else {
    let angle = 0;
    for (const [classId, count] of dist) {
      const sweep = (count / total) * 2 * Math.PI;
      const [x0, y0] = polar(cx, cy, radius, angle);
      const [x1, y1] = polar(cx, cy, radius, angle + sweep);
      const large = sweep > Math.PI ? 1 : 0;
      const path = document.createElementNS(SVG_NS, "path");
      path.setAttribute(
        "d",
        `M ${cx} ${cy} L ${x0} ${y0} A ${radius} ${radius} 0 ${large} 1 ${x1} ${y1} Z`,
      );
      path.setAttribute("fill", segmentColor(classId));
      path.setAttribute("class", segmentClass(classId, options.selected));
      interactive(path, classId, options.onSelect);
      svg.append(path);
      angle += sweep;
    }
  }
  container.append(svg);
}

function renderBars(
  container: HTMLElement,
  dist: [number, number][],
  options: ChartOptions,
): void {
  const max = Math.max(...dist.map(([, count]) => count));
  const list = document.createElement("div");
  list.className = "bar-chart";
  for (const [classId, count] of dist) {
    const row = document.createElement("div");
    row.className = "bar-row";
    const label = document.createElement("span");
    label.className = "bar-label";
    label.textContent = classLabel(classId);
    const bar = document.createElement("div");
    bar.className = `bar ${segmentClass(classId, options.selected)}`;
    bar.style.width = `${Math.max(4, Math.round((count / max) * 100))}%`;
    bar.style.backgroundColor = segmentColor(classId);
    bar.textContent = String(count);
    interactive(bar, classId, options.onSelect);
    row.append(label, bar);
    list.append(row);
  }
  container.append(list);
}

function segmentClass(classId: number, selected: number | null): string {
  return selected === classId ? "segment selected" : "segment";
}

export function renderChart(
  container: HTMLElement,
  distribution: Record<string, number>,
  options: ChartOptions,
): void {
  container.replaceChildren();
  const dist = entries(distribution);
  if (dist.length === 0) {
    const empty = document.createElement("p");
    empty.className = "chart-empty";
    empty.textContent = "no classified passages to chart";
    container.append(empty);
    return;
  }
  if (options.mode === "pie") {
    renderPie(container, dist, options);
  } else {
    renderBars(container, dist, options);
  }

  const legend = document.createElement("ul");
  legend.className = "legend";
  for (const [classId, count] of dist) {
    const item = document.createElement("li");
    item.className = options.selected === classId ? "legend-item selected" : "legend-item";
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.backgroundColor = segmentColor(classId);
    const label = document.createElement("span");
    label.textContent = `${classLabel(classId)} (${count})`;
    interactive(item, classId, options.onSelect);
    item.append(swatch, label);
    legend.append(item);
  }
  container.append(legend);
}
