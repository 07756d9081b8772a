// Thin typed client for the service API. The fetch implementation and the
// EventSource constructor are injectable so tests can fake the backend.

import type {
  Frame,
  ModelDoc,
  ParametersResponse,
  SessionInfo,
  TaxonMatch,
  ValidationReport,
} from "./types.js";

export interface FrameSubscription {
  close(): void;
}

export type EventSourceFactory = (url: string) => {
  onmessage: ((event: { data: string }) => void) | null;
  onerror: ((event: unknown) => void) | null;
  close(): void;
};

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public body: unknown = null,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: typeof fetch = fetch.bind(globalThis),
    private eventSourceFactory: EventSourceFactory = (url) =>
      new EventSource(url) as unknown as ReturnType<EventSourceFactory>,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const parsed = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiError(response.status, `${method} ${path} failed`, parsed);
    }
    return parsed as T;
  }

  createModel(doc: ModelDoc): Promise<{ id: string }> {
    return this.request("POST", "/api/v1/models", doc);
  }

  getModel(modelId: string): Promise<ModelDoc> {
    return this.request("GET", `/api/v1/models/${encodeURIComponent(modelId)}`);
  }

  putModel(modelId: string, doc: ModelDoc): Promise<{ id: string }> {
    return this.request("PUT", `/api/v1/models/${encodeURIComponent(modelId)}`, doc);
  }

  validateModel(modelId: string): Promise<ValidationReport> {
    return this.request(
      "POST",
      `/api/v1/models/${encodeURIComponent(modelId)}/validate`,
    );
  }

  searchSpecies(query: string): Promise<TaxonMatch[]> {
    return this.request("GET", `/api/v1/species?q=${encodeURIComponent(query)}`);
  }

  speciesParameters(taxonId: string): Promise<ParametersResponse> {
    return this.request(
      "GET",
      `/api/v1/species/${encodeURIComponent(taxonId)}/parameters`,
    );
  }

  createSimulation(body: {
    model_id: string;
    seed: number;
    max_ticks: number;
  }): Promise<{ session_id: string }> {
    return this.request("POST", "/api/v1/simulations", body);
  }

  command(
    sessionId: string,
    command: "start" | "stop" | "reset" | "step",
  ): Promise<SessionInfo> {
    return this.request(
      "POST",
      `/api/v1/simulations/${encodeURIComponent(sessionId)}/command`,
      { command },
    );
  }

  subscribeFrames(
    sessionId: string,
    onFrame: (frame: Frame) => void,
    onError?: () => void,
  ): FrameSubscription {
    const source = this.eventSourceFactory(
      `${this.baseUrl}/api/v1/simulations/${encodeURIComponent(sessionId)}/frames`,
    );
    source.onmessage = (event) => onFrame(JSON.parse(event.data) as Frame);
    source.onerror = () => onError?.();
    return { close: () => source.close() };
  }
}
