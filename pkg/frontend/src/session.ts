// Client-side session state. History is append-only within a session;
// settings are read once per send, so changing the slider never rewrites
// past entries.

import type { QueryResponse } from "./api.js";

export interface Settings {
  k: number;
  systemPromptId: string;
  endpoint: string;
}

export interface SentRequest {
  text: string;
  k: number;
  systemPromptId: string;
}

export interface HistoryEntry {
  request: SentRequest;
  response: QueryResponse | null;
  error: string | null;
}

export class ConsoleSession {
  readonly settings: Settings;
  private readonly entries: HistoryEntry[] = [];

  constructor(settings?: Partial<Settings>) {
    this.settings = {
      k: 4,
      systemPromptId: "default",
      endpoint: "",
      ...settings,
    };
  }

  get history(): readonly HistoryEntry[] {
    return this.entries;
  }

  /** Snapshot the current settings into a concrete request. */
  prepare(text: string): SentRequest {
    return {
      text,
      k: this.settings.k,
      systemPromptId: this.settings.systemPromptId,
    };
  }

  append(request: SentRequest, response: QueryResponse | null, error: string | null = null): HistoryEntry {
    const entry: HistoryEntry = { request, response, error };
    this.entries.push(entry);
    return entry;
  }
}
