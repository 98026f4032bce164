// Browser entry: wires the controller to the page served next to the session
// API.  The lambda slider only applies at creation; afterwards the session's
// own config is what the view reports.

import { SessionClient } from "./client.js";
import { Console, ConsoleStatus } from "./console.js";
import { statusHtml } from "./html.js";
import { parsePriorityList } from "./view.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const client = new SessionClient("");
const console_ = new Console(client);
const root = el<HTMLDivElement>("console");

function draw(status: ConsoleStatus): void {
  root.innerHTML = statusHtml(status);
  for (const button of root.querySelectorAll<HTMLButtonElement>("button[data-group]")) {
    button.addEventListener("click", async () => {
      draw(await console_.pickRow(Number(button.dataset.group)));
    });
  }
}

el<HTMLInputElement>("lambda").addEventListener("input", (ev) => {
  el<HTMLSpanElement>("lambda-value").textContent =
    (ev.target as HTMLInputElement).value;
});

el<HTMLButtonElement>("create").addEventListener("click", async () => {
  const bundle = el<HTMLInputElement>("bundle").value.trim();
  const lambda = Number(el<HTMLInputElement>("lambda").value);
  draw(await console_.create({ bundle, config: { lambda } }));
});

el<HTMLInputElement>("priority").addEventListener("change", (ev) => {
  try {
    draw(console_.setPriorityList(parsePriorityList((ev.target as HTMLInputElement).value)));
  } catch (err) {
    root.querySelector(".banner")?.remove();
    root.insertAdjacentHTML(
      "afterbegin",
      `<div class="banner" role="alert">${err instanceof Error ? err.message : err}</div>`,
    );
  }
});

el<HTMLButtonElement>("auto").addEventListener("click", async () => {
  draw(await console_.autoStep(1));
});
el<HTMLButtonElement>("run-out").addEventListener("click", async () => {
  draw(await console_.autoStep(10_000));
});
el<HTMLButtonElement>("finish").addEventListener("click", async () => {
  draw(await console_.finish());
});
el<HTMLButtonElement>("refresh").addEventListener("click", async () => {
  draw(await console_.refresh());
});
