/** Typed client for the detection service HTTP API.
 *
 * The console is a pure client: every number it displays comes from these
 * responses verbatim. Live results arrive over a server-sent event stream
 * with an automatic fall back to cursor polling.
 */

import type {
  FlightDetail,
  FlightSummary,
  LoginResponse,
  ResultEvent,
  ServiceState,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

async function expectJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (typeof body.detail === "string") detail = body.detail;
    } catch {
      /* non-JSON error body; keep the status text */
    }
    throw new ApiError(response.status, detail);
  }
  return response.json() as Promise<T>;
}

export interface SubscriptionHandle {
  close(): void;
}

export class ApiClient {
  private token: string | null = null;

  constructor(readonly baseUrl: string) {}

  get authenticated(): boolean {
    return this.token !== null;
  }

  private headers(extra: Record<string, string> = {}): Record<string, string> {
    const h: Record<string, string> = { ...extra };
    if (this.token) h["Authorization"] = `Bearer ${this.token}`;
    return h;
  }

  async login(username: string, password: string): Promise<LoginResponse> {
    const res = await fetch(`${this.baseUrl}/auth/login`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ username, password }),
    });
    const body = await expectJson<LoginResponse>(res);
    this.token = body.token;
    return body;
  }

  logout(): void {
    this.token = null;
  }

  private async control(command: "start" | "pause" | "stop",
                        body?: { freeway: string; date: string }): Promise<ServiceState> {
    const res = await fetch(`${this.baseUrl}/control/${command}`, {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: body ? JSON.stringify(body) : "{}",
    });
    return expectJson<ServiceState>(res);
  }

  start(meta?: { freeway: string; date: string }): Promise<ServiceState> {
    return this.control("start", meta);
  }

  pause(): Promise<ServiceState> {
    return this.control("pause");
  }

  stop(): Promise<ServiceState> {
    return this.control("stop");
  }

  async state(): Promise<ServiceState> {
    return expectJson<ServiceState>(await fetch(`${this.baseUrl}/live/state`));
  }

  async ingest(lines: string): Promise<{ accepted: number; malformed: number }> {
    const res = await fetch(`${this.baseUrl}/feed/ingest`, {
      method: "POST",
      headers: this.headers({ "Content-Type": "text/plain" }),
      body: lines,
    });
    return expectJson(res);
  }

  async pollResults(since: number): Promise<ResultEvent[]> {
    const res = await fetch(`${this.baseUrl}/live/results/poll?since=${since}`);
    const body = await expectJson<{ events: ResultEvent[] }>(res);
    return body.events;
  }

  async flights(query: { freeway?: string; date?: string } = {}): Promise<FlightSummary[]> {
    const params = new URLSearchParams();
    if (query.freeway) params.set("freeway", query.freeway);
    if (query.date) params.set("date", query.date);
    const qs = params.toString();
    const res = await fetch(`${this.baseUrl}/flights${qs ? `?${qs}` : ""}`);
    const body = await expectJson<{ flights: FlightSummary[] }>(res);
    return body.flights;
  }

  async flightDetail(flightId: string): Promise<FlightDetail> {
    return expectJson<FlightDetail>(
      await fetch(`${this.baseUrl}/flights/${flightId}`));
  }

  previewUrl(flightId: string, segmentId: string): string {
    return `${this.baseUrl}/flights/${flightId}/segments/${segmentId}/preview`;
  }

  async recentLogs(): Promise<string[]> {
    const res = await fetch(`${this.baseUrl}/logs/recent`);
    const body = await expectJson<{ lines: string[] }>(res);
    return body.lines;
  }

  /** Subscribe to live results; falls back to 2 s polling if the event
   * stream cannot be held open. Exactly-once delivery is enforced with the
   * event sequence number. */
  subscribeResults(onEvent: (event: ResultEvent) => void,
                   onFallback?: () => void): SubscriptionHandle {
    let closed = false;
    let lastSeq = 0;
    let pollTimer: ReturnType<typeof setTimeout> | null = null;

    const deliver = (event: ResultEvent) => {
      if (event.seq > lastSeq) {
        lastSeq = event.seq;
        onEvent(event);
      }
    };

    const poll = async () => {
      if (closed) return;
      try {
        for (const event of await this.pollResults(lastSeq)) deliver(event);
      } catch {
        /* transient poll failure; next tick retries */
      }
      pollTimer = setTimeout(poll, 2000);
    };

    const stream = async () => {
      try {
        const res = await fetch(`${this.baseUrl}/live/results`, {
          headers: { Accept: "text/event-stream" },
        });
        if (!res.ok || !res.body) throw new ApiError(res.status, "no stream");
        for await (const data of sseData(res.body)) {
          if (closed) return;
          deliver(JSON.parse(data) as ResultEvent);
        }
      } catch {
        /* stream broken or unsupported */
      }
      if (!closed) {
        onFallback?.();
        void poll();
      }
    };

    void stream();
    return {
      close() {
        closed = true;
        if (pollTimer) clearTimeout(pollTimer);
      },
    };
  }

  /** Tail the service log stream; reconnects after a drop. */
  subscribeLogs(onLine: (line: string) => void): SubscriptionHandle {
    let closed = false;
    let retryTimer: ReturnType<typeof setTimeout> | null = null;

    const connect = async () => {
      try {
        const res = await fetch(`${this.baseUrl}/logs/stream`, {
          headers: { Accept: "text/event-stream" },
        });
        if (!res.ok || !res.body) throw new ApiError(res.status, "no stream");
        for await (const data of sseData(res.body)) {
          if (closed) return;
          onLine(JSON.parse(data) as string);
        }
      } catch {
        /* fall through to reconnect */
      }
      if (!closed) retryTimer = setTimeout(connect, 2000);
    };

    void connect();
    return {
      close() {
        closed = true;
        if (retryTimer) clearTimeout(retryTimer);
      },
    };
  }
}

/** Yield the data payload of each server-sent event on the stream. */
export async function* sseData(body: ReadableStream<Uint8Array>): AsyncGenerator<string> {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  try {
    while (true) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let cut;
      while ((cut = buffer.indexOf("\n\n")) >= 0) {
        const chunk = buffer.slice(0, cut);
        buffer = buffer.slice(cut + 2);
        const data = chunk
          .split("\n")
          .filter((ln) => ln.startsWith("data:"))
          .map((ln) => ln.slice(5).trimStart())
          .join("\n");
        if (data) yield data;
      }
    }
  } finally {
    reader.releaseLock();
  }
}
