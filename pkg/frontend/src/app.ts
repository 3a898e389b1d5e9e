import { ApiClient } from "./api.js";
import { Session } from "./session.js";
import { describeEdge, layoutOnCircle } from "./graph.js";
import { pageLabel } from "./grid.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderBanners(session: Session): HTMLElement {
  const box = el("div", "banners");
  for (const banner of session.banners) {
    box.appendChild(el("div", `banner banner-${banner.level}`, banner.text));
  }
  return box;
}

function renderThread(session: Session): HTMLElement {
  const box = el("div", "thread");
  for (const message of session.thread) {
    box.appendChild(el("div", `message message-${message.role}`, message.text));
  }
  if (session.lastStatus === "Exhausted") {
    const trail = el("div", "attempts-trail");
    session.attemptsTrail.forEach((attempt, i) => {
      const failed = attempt.reports.find((r) => r.status === "Invalid");
      trail.appendChild(el(
        "div", "attempt",
        `attempt ${i + 1}: ${failed?.message ?? "rejected"}`,
      ));
    });
    box.appendChild(trail);
  }
  return box;
}

function renderQueryPanel(session: Session): HTMLElement {
  const box = el("div", "query-panel");
  const area = el("textarea", "query-text");
  area.value = session.query.text;
  area.addEventListener("change", () => {
    void session.edit(area.value);
  });
  box.appendChild(area);
  if (session.query.userModified) {
    box.appendChild(el("span", "query-flag", "user-modified"));
  }
  for (const issue of session.query.issues) {
    const where = issue.line === null
      ? ""
      : ` (line ${issue.line}, column ${issue.column})`;
    box.appendChild(el(
      "div", "inline-issue", `${issue.checkerType}: ${issue.message}${where}`,
    ));
  }
  return box;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function renderGrounding(session: Session): HTMLElement {
  const box = el("div", "grounding");
  if (session.grounding === null) return box;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "0 0 360 360");
  const positions = layoutOnCircle(session.grounding, 140, 180, 180);
  for (const edge of session.grounding.edges) {
    const a = positions.get(edge.source);
    const b = positions.get(edge.target);
    if (!a || !b) continue;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(a.x));
    line.setAttribute("y1", String(a.y));
    line.setAttribute("x2", String(b.x));
    line.setAttribute("y2", String(b.y));
    line.setAttribute("class", "graph-edge");
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = describeEdge(edge);
    line.appendChild(title);
    svg.appendChild(line);
  }
  for (const node of session.grounding.nodes) {
    const at = positions.get(node.id);
    if (!at) continue;
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(at.x));
    dot.setAttribute("cy", String(at.y));
    dot.setAttribute("r", "8");
    dot.setAttribute("class", node.seed ? "graph-node seed" : "graph-node");
    svg.appendChild(dot);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(at.x));
    label.setAttribute("y", String(at.y - 12));
    label.setAttribute("text-anchor", "middle");
    label.textContent = node.id;
    svg.appendChild(label);
  }
  box.appendChild(svg);
  return box;
}

function renderGrid(session: Session): HTMLElement {
  const box = el("div", "result-grid");
  if (session.grid === null) return box;
  const table = el("table");
  const head = el("tr");
  for (const column of session.grid.columns) {
    head.appendChild(el("th", undefined, column));
  }
  table.appendChild(head);
  for (const row of session.grid.rows) {
    const tr = el("tr");
    for (const cell of row) tr.appendChild(el("td", undefined, cell));
    table.appendChild(tr);
  }
  box.appendChild(table);
  box.appendChild(el("div", "page-label", pageLabel(session.grid)));
  return box;
}

function renderChart(session: Session): HTMLElement {
  const box = el("div", "chart-panel");
  if (session.chart === null) return box;
  if (!session.chart.ok) {
    box.appendChild(el("div", "chart-problem", session.chart.problem));
    return box;
  }
  const { spec, points } = session.chart;
  box.appendChild(el("div", "chart-title", spec.title));
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "0 0 400 200");
  const peak = Math.max(...points.map((p) => Math.abs(p.y)), 1);
  const width = 400 / Math.max(points.length, 1);
  points.forEach((point, i) => {
    const h = (Math.abs(point.y) / peak) * 180;
    if (spec.kind === "bar" || spec.kind === "pie" || spec.kind === "table") {
      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(i * width + 2));
      rect.setAttribute("y", String(200 - h));
      rect.setAttribute("width", String(Math.max(width - 4, 1)));
      rect.setAttribute("height", String(h));
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = `${point.x}: ${point.y}`;
      rect.appendChild(title);
      svg.appendChild(rect);
    } else {
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", String(i * width + width / 2));
      dot.setAttribute("cy", String(200 - h));
      dot.setAttribute("r", "4");
      svg.appendChild(dot);
    }
  });
  box.appendChild(svg);
  return box;
}

export function render(session: Session, root: HTMLElement): void {
  root.replaceChildren(
    renderBanners(session),
    renderThread(session),
    renderQueryPanel(session),
    renderGrounding(session),
    renderGrid(session),
    renderChart(session),
  );
  root.querySelectorAll("button").forEach((button) => {
    button.disabled = session.controlsDisabled;
  });
}

export function mount(root: HTMLElement, baseUrl: string): Session {
  const session = new Session(new ApiClient(baseUrl));
  const redraw = () => render(session, root);

  const controls = el("div", "controls");
  const questionBox = el("input") as HTMLInputElement;
  questionBox.placeholder = "Ask a business question";
  const askButton = el("button", undefined, "Ask");
  askButton.addEventListener("click", () => {
    void session.ask(questionBox.value).then(redraw);
    redraw();
  });
  const executeButton = el("button", undefined, "Execute");
  executeButton.addEventListener("click", () => {
    void session.execute().then(redraw);
    redraw();
  });
  const chartButton = el("button", undefined, "Visualize");
  chartButton.addEventListener("click", () => {
    void session.visualize().then(redraw);
    redraw();
  });
  const archiveButton = el("button", undefined, "Archive");
  archiveButton.addEventListener("click", () => {
    void session.archive().then(redraw);
    redraw();
  });
  controls.append(
    questionBox, askButton, executeButton, chartButton, archiveButton,
  );
  root.before(controls);
  redraw();
  return session;
}
