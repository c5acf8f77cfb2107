import { describe, expect, it, vi } from "vitest";

import type { CorpusSegment, QueryResponse } from "../src/api.js";
import {
  highlightPassage,
  renderAnswerView,
  renderErrorBanner,
  renderIndexBanner,
  renderSegmentView,
} from "../src/view.js";
import { loadFixture } from "./helpers.js";

const queryK4 = loadFixture("query_k4").body as QueryResponse;
const queryK0 = loadFixture("query_k0").body as QueryResponse;
const article = loadFixture("corpus_article").body as CorpusSegment;

describe("renderAnswerView", () => {
  it("shows the answer and k ranked passage cards", () => {
    const view = renderAnswerView(queryK4, { requestedK: 4 });
    expect(view.querySelector(".answer-text")?.textContent).toBe(queryK4.answer);
    const cards = [...view.querySelectorAll(".passage-card")];
    expect(cards).toHaveLength(4);
    expect(cards.map((c) => c.getAttribute("data-rank"))).toEqual(["1", "2", "3", "4"]);
    const firstHeader = cards[0].querySelector(".passage-ref")?.textContent ?? "";
    expect(firstHeader).toContain("Pasal");
    expect(cards[0].querySelector(".passage-score")?.textContent).toBe(
      queryK4.hits[0].score.toFixed(6));
  });

  it("renders a clickable citation chip per citation", () => {
    const clicked: string[] = [];
    const view = renderAnswerView(queryK4, {
      requestedK: 4,
      onCitationClick: (ref) => clicked.push(ref),
    });
    const chips = [...view.querySelectorAll<HTMLButtonElement>(".citation-chip")];
    expect(chips).toHaveLength(queryK4.citations.length);
    chips.forEach((chip) => chip.click());
    expect(clicked).toEqual(queryK4.citations);
  });

  it("shows the no-retrieval badge for k=0", () => {
    const view = renderAnswerView(queryK0, { requestedK: 0 });
    expect(view.querySelector(".badge-no-retrieval")?.textContent).toBe("no retrieval");
    expect(view.querySelectorAll(".passage-card")).toHaveLength(0);
  });

  it("omits the badge when retrieval ran", () => {
    const view = renderAnswerView(queryK4, { requestedK: 4 });
    expect(view.querySelector(".badge-no-retrieval")).toBeNull();
  });
});

describe("highlightPassage", () => {
  it("marks exactly the card with the given ref", () => {
    const view = renderAnswerView(queryK4, { requestedK: 4 });
    const ref = queryK4.hits[1].ref!;
    highlightPassage(view, ref);
    const highlighted = [...view.querySelectorAll(".passage-card.highlighted")];
    expect(highlighted).toHaveLength(1);
    expect(highlighted[0].getAttribute("data-ref")).toBe(ref);
  });
});

describe("renderSegmentView", () => {
  it("shows the article with the cited clause highlighted", () => {
    const view = renderSegmentView(article, 2);
    expect(view.querySelector(".pane-title")?.textContent).toBe("PP-57-2021 Pasal 3");
    const lines = [...view.querySelectorAll(".segment-line")];
    expect(lines.length).toBeGreaterThan(1);
    const highlighted = [...view.querySelectorAll(".highlighted-clause")];
    expect(highlighted).toHaveLength(1);
    expect(highlighted[0].textContent?.startsWith("(2)")).toBe(true);
  });

  it("shows a full article without highlight for article refs", () => {
    const view = renderSegmentView(article);
    expect(view.querySelectorAll(".highlighted-clause")).toHaveLength(0);
  });
});

describe("banners", () => {
  it("renders error banners with role=alert", () => {
    const banner = renderErrorBanner("HTTP 404: no segment");
    expect(banner.getAttribute("role")).toBe("alert");
    expect(banner.textContent).toContain("404");
  });

  it("renders the index banner with a working action", () => {
    const onIndex = vi.fn();
    const banner = renderIndexBanner(onIndex);
    expect(banner.textContent).toContain("index not loaded");
    banner.querySelector<HTMLButtonElement>(".banner-action")?.click();
    expect(onIndex).toHaveBeenCalledTimes(1);
  });
});
