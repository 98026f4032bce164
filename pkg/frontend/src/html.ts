// HTML fragments for the console, as pure functions of the view.  Kept free
// of document/window so they render (and test) the same everywhere.

import { ConsoleStatus } from "./console.js";
import { ConsoleView } from "./view.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function candidateTableHtml(view: ConsoleView): string {
  const rows = view.candidateTable.map((r) => {
    const classes = ["candidate", r.eligible ? "eligible" : "blocked"];
    if (r.priority) classes.push("priority");
    const badge = r.priority ? ' <span class="badge">priority</span>' : "";
    const button = `<button data-group="${r.group}"${r.pickable ? "" : " disabled"}>pick</button>`;
    return `<tr class="${classes.join(" ")}"><td>${r.group}${badge}</td>` +
      `<td>${r.score.toFixed(6)}</td><td>${(100 * r.ratio).toFixed(1)}%</td>` +
      `<td>${button}</td></tr>`;
  });
  return `<table class="candidates"><thead><tr>` +
    `<th>group</th><th>score</th><th>of best</th><th></th></tr></thead>` +
    `<tbody>${rows.join("")}</tbody></table>`;
}

export function timelineHtml(view: ConsoleView): string {
  const parts = view.timeline.map(
    (e) => `<span class="event ${e.kind}">${esc(e.label)}</span>`,
  );
  return `<div class="timeline">${parts.join(", ")}</div>`;
}

/** Polyline points for the objective-vs-step chart, in a unit viewbox. */
export function qCurvePoints(view: ConsoleView, width = 100, height = 40): string {
  const pts = view.qCurve;
  if (pts.length === 0) return "";
  const qs = pts.map((p) => p.Q);
  const qMin = Math.min(...qs);
  const qMax = Math.max(...qs);
  const span = qMax - qMin || 1;
  const xStep = pts.length > 1 ? width / (pts.length - 1) : 0;
  return pts
    .map((p, i) => `${(i * xStep).toFixed(2)},${(height * (1 - (p.Q - qMin) / span)).toFixed(2)}`)
    .join(" ");
}

export function statusHtml(status: ConsoleStatus): string {
  const banner = status.banner
    ? `<div class="banner" role="alert">${esc(status.banner)}</div>`
    : "";
  if (!status.view) return `${banner}<p class="empty">no session</p>`;
  const v = status.view;
  const finished = status.finished
    ? `<div class="model">final groups: ${status.finished.model.active_groups.join(", ")}</div>`
    : "";
  const phase = `<p class="phase">phase: ${v.phase}` +
    (v.finishReason ? ` (${esc(v.finishReason)})` : "") +
    ` - iteration ${v.iteration} - active [${v.activeGroups.join(", ")}]</p>`;
  const chart = `<svg viewBox="0 0 100 40" class="qcurve">` +
    `<polyline fill="none" points="${qCurvePoints(v)}"/></svg>`;
  const table = v.phase === "awaiting_pick" ? candidateTableHtml(v) : "";
  return banner + phase + table + timelineHtml(v) + chart + finished;
}
