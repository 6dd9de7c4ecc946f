/** HTTP client: thin typed wrappers plus the two client-side protocols the
 * comparison surface needs — fingerprint gating (stale payloads trigger one
 * refetch) and per-panel debouncing (at most one in-flight filter update). */

import type {
  AggregatePayload,
  CohortName,
  ComparePayload,
  ExplanationPayload,
  FilterPayload,
  FilterSetJson,
  SchemaPayload,
  SlicePayload,
  SortKey,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.base}${path}`, init);
    if (!response.ok) {
      const body = await response.text();
      throw new Error(`${path}: HTTP ${response.status} ${body}`);
    }
    return (await response.json()) as T;
  }

  createSession(body: Record<string, unknown>): Promise<{ session_id: string }> {
    return this.request("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  schema(sid: string): Promise<SchemaPayload> {
    return this.request(`/sessions/${sid}/schema`);
  }

  filter(sid: string, which: CohortName): Promise<FilterPayload> {
    return this.request(`/sessions/${sid}/filters/${which}`);
  }

  putFilter(sid: string, which: CohortName, fs: FilterSetJson): Promise<FilterPayload> {
    return this.request(`/sessions/${sid}/filters/${which}`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(fs),
    });
  }

  compare(sid: string, sort: SortKey): Promise<ComparePayload> {
    return this.request(`/sessions/${sid}/compare?sort=${sort}`);
  }

  aggregate(sid: string, which: CohortName): Promise<AggregatePayload> {
    return this.request(`/sessions/${sid}/aggregate/${which}`);
  }

  explanation(sid: string, rowId: number): Promise<ExplanationPayload> {
    return this.request(`/sessions/${sid}/explanations/${rowId}`);
  }

  slice(
    sid: string,
    cohort: CohortName,
    feature: number,
    bin: number,
  ): Promise<SlicePayload> {
    return this.request(
      `/sessions/${sid}/slice?cohort=${cohort}&feature=${feature}&bin=${bin}`,
    );
  }

  putConfig(sid: string, body: Record<string, unknown>): Promise<Record<string, unknown>> {
    return this.request(`/sessions/${sid}/config`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }
}

/** Applies payloads only when their fingerprint matches the session's current
 * one; a mismatch marks the view stale and triggers exactly one refetch. */
export class FingerprintGate {
  private refetching = false;

  constructor(
    private fingerprint: string,
    private readonly refetch: () => Promise<void>,
  ) {}

  current(): string {
    return this.fingerprint;
  }

  /** Adopt a new fingerprint after a deliberate config change or refetch. */
  adopt(fingerprint: string): void {
    this.fingerprint = fingerprint;
    this.refetching = false;
  }

  /** True when the payload may be applied; false schedules a refetch. */
  admit(payload: { fingerprint: string }): boolean {
    if (payload.fingerprint === this.fingerprint) {
      return true;
    }
    if (!this.refetching) {
      this.refetching = true;
      void this.refetch().finally(() => {
        this.refetching = false;
      });
    }
    return false;
  }
}

/** Debounces filter edits: at most one request in flight per panel; while one
 * runs, only the latest queued edit survives and is sent afterwards. */
export class PanelUpdater {
  private inFlight = false;
  private queued: FilterSetJson | null = null;

  constructor(
    private readonly send: (fs: FilterSetJson) => Promise<FilterPayload>,
    private readonly apply: (payload: FilterPayload) => void,
  ) {}

  submit(fs: FilterSetJson): void {
    if (this.inFlight) {
      this.queued = fs;
      return;
    }
    this.inFlight = true;
    void this.send(fs)
      .then((payload) => this.apply(payload))
      .catch(() => undefined)
      .finally(() => {
        this.inFlight = false;
        const next = this.queued;
        this.queued = null;
        if (next) {
          this.submit(next);
        }
      });
  }

  busy(): boolean {
    return this.inFlight;
  }
}
