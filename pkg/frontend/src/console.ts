// Console controller: one in-flight query at a time; a newer send aborts the
// pending one and owns the output pane. Citation clicks resolve through the
// corpus endpoint and highlight both the passage card and the cited clause.

import { ApiClient, ApiError } from "./api.js";
import { articleRef, parseRef } from "./refs.js";
import { ConsoleSession } from "./session.js";
import {
  highlightPassage,
  renderAnswerView,
  renderErrorBanner,
  renderIndexBanner,
  renderSegmentView,
  renderSpinner,
} from "./view.js";

export class ConsoleController {
  private inflight: AbortController | null = null;

  constructor(public api: ApiClient, public session: ConsoleSession,
              private output: HTMLElement, private detail: HTMLElement,
              private defaultCorpusPath = "src/lexrag/data/desk_corpus") {}

  async send(text: string): Promise<void> {
    const trimmed = text.trim();
    if (!trimmed) return;
    const request = this.session.prepare(trimmed);
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.output.replaceChildren(renderSpinner());
    try {
      const response = await this.api.query(
        request.text, request.k, request.systemPromptId, controller.signal);
      if (controller.signal.aborted) return; // superseded by a later send
      this.session.append(request, response);
      this.output.replaceChildren(renderAnswerView(response, {
        requestedK: request.k,
        onCitationClick: (ref) => void this.inspect(ref),
      }));
    } catch (error) {
      if (controller.signal.aborted) return;
      const message = error instanceof Error ? error.message : String(error);
      this.session.append(request, null, message);
      if (error instanceof ApiError && error.status === 409) {
        this.output.replaceChildren(
          renderIndexBanner(() => void this.indexCorpus()));
      } else {
        this.output.replaceChildren(renderErrorBanner(message));
      }
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }

  async inspect(ref: string): Promise<void> {
    highlightPassage(this.output, ref);
    const target = articleRef(ref) ?? ref;
    const clause = parseRef(ref).clauseNumber;
    try {
      const segment = await this.api.corpus(target);
      this.detail.replaceChildren(renderSegmentView(segment, clause));
    } catch (error) {
      const message = error instanceof Error ? error.message : String(error);
      this.detail.replaceChildren(renderErrorBanner(message));
    }
  }

  async indexCorpus(path = this.defaultCorpusPath): Promise<void> {
    try {
      const result = await this.api.indexPath(path);
      this.output.replaceChildren(renderErrorBanner(
        `indexed ${result.entries} entries (dim ${result.dim}); ask again`));
      this.output.firstElementChild?.classList.remove("banner-error");
      this.output.firstElementChild?.classList.add("banner-info");
    } catch (error) {
      const message = error instanceof Error ? error.message : String(error);
      this.detail.replaceChildren(renderErrorBanner(message));
    }
  }
}
