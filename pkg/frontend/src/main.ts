// Page wiring: form, k slider, endpoint box, and the two output panes.

import { ApiClient } from "./api.js";
import { ConsoleController } from "./console.js";
import { ConsoleSession } from "./session.js";

function required<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const session = new ConsoleSession();
const api = new ApiClient(session.settings.endpoint);
const controller = new ConsoleController(
  api, session,
  required<HTMLDivElement>("output"),
  required<HTMLDivElement>("detail"),
);

const form = required<HTMLFormElement>("query-form");
const input = required<HTMLInputElement>("query-input");
const slider = required<HTMLInputElement>("k-slider");
const sliderValue = required<HTMLSpanElement>("k-value");
const endpointInput = required<HTMLInputElement>("endpoint-input");
const healthNote = required<HTMLSpanElement>("health-note");

slider.addEventListener("input", () => {
  session.settings.k = Number(slider.value);
  sliderValue.textContent = slider.value;
});

endpointInput.addEventListener("change", () => {
  session.settings.endpoint = endpointInput.value.trim();
  api.baseUrl = session.settings.endpoint;
  void refreshHealth();
});

form.addEventListener("submit", (event) => {
  event.preventDefault();
  void controller.send(input.value);
});

async function refreshHealth(): Promise<void> {
  try {
    const health = await api.health();
    healthNote.textContent = health.kb_loaded
      ? `knowledge base loaded (${health.entries} entries)`
      : "knowledge base not loaded";
  } catch {
    healthNote.textContent = "service unreachable";
  }
}

void refreshHealth();
