// DOM rendering for the console. Pure element builders: callers decide where
// to mount and what happens on clicks.

import type { CorpusSegment, QueryResponse } from "./api.js";
import { formatRef } from "./refs.js";

export function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface AnswerViewOptions {
  requestedK: number;
  onCitationClick?: (ref: string) => void;
}

export function renderAnswerView(response: QueryResponse,
                                 options: AnswerViewOptions): HTMLElement {
  const root = el("div", "answer-view");

  const answerPane = el("section", "answer-pane");
  answerPane.appendChild(el("h2", "pane-title", "Answer"));
  if (options.requestedK === 0) {
    answerPane.appendChild(el("span", "badge badge-no-retrieval", "no retrieval"));
  }
  answerPane.appendChild(el("pre", "answer-text", response.answer));

  const meta = el("div", "answer-meta",
                  `${response.model_id} · ${response.latency_ms} ms`);
  answerPane.appendChild(meta);

  if (response.citations.length > 0) {
    const chips = el("div", "citation-chips");
    for (const ref of response.citations) {
      const chip = el("button", "citation-chip", formatRef(ref));
      chip.setAttribute("data-ref", ref);
      chip.addEventListener("click", () => options.onCitationClick?.(ref));
      chips.appendChild(chip);
    }
    answerPane.appendChild(chips);
  }
  root.appendChild(answerPane);

  const passages = el("section", "passage-panel");
  passages.appendChild(el("h2", "pane-title", "Retrieved passages"));
  if (response.hits.length === 0) {
    passages.appendChild(el("p", "empty-note", "No passages retrieved."));
  }
  for (const hit of response.hits) {
    const card = el("article", "passage-card");
    card.setAttribute("data-rank", String(hit.rank));
    if (hit.ref) card.setAttribute("data-ref", hit.ref);
    const header = el("header", "passage-header");
    header.appendChild(el("span", "passage-rank", `#${hit.rank}`));
    header.appendChild(el("span", "passage-ref",
                          hit.ref ? formatRef(hit.ref) : hit.entry_id));
    header.appendChild(el("span", "passage-score", hit.score.toFixed(6)));
    card.appendChild(header);
    card.appendChild(el("p", "passage-text", hit.text));
    passages.appendChild(card);
  }
  root.appendChild(passages);
  return root;
}

export function highlightPassage(root: HTMLElement, ref: string): void {
  root.querySelectorAll(".passage-card").forEach((card) => {
    card.classList.toggle("highlighted", card.getAttribute("data-ref") === ref);
  });
}

/**
 * Article context around a citation. For clause refs the matching clause
 * line of the article rendering is highlighted.
 */
export function renderSegmentView(segment: CorpusSegment,
                                  highlightClause?: number): HTMLElement {
  const root = el("section", "segment-view");
  root.appendChild(el("h2", "pane-title", segment.display));
  const body = el("div", "segment-body");
  const marker = highlightClause !== undefined ? `(${highlightClause}) ` : null;
  for (const line of segment.rendered.split("\n")) {
    const lineEl = el("div", "segment-line", line);
    if (marker && line.startsWith(marker)) {
      lineEl.classList.add("highlighted-clause");
    }
    body.appendChild(lineEl);
  }
  root.appendChild(body);
  return root;
}

export function renderErrorBanner(message: string): HTMLElement {
  const banner = el("div", "banner banner-error");
  banner.setAttribute("role", "alert");
  banner.appendChild(el("span", "banner-text", message));
  return banner;
}

export function renderIndexBanner(onIndex: () => void): HTMLElement {
  const banner = el("div", "banner banner-warning");
  banner.setAttribute("role", "alert");
  banner.appendChild(el("span", "banner-text", "index not loaded"));
  const action = el("button", "banner-action", "Index corpus");
  action.addEventListener("click", onIndex);
  banner.appendChild(action);
  return banner;
}

export function renderSpinner(): HTMLElement {
  return el("div", "spinner", "querying...");
}
