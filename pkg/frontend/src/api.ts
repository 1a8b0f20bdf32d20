import type {
  AutoseedRequest,
  AutoseedResponse,
  SegmentRequest,
  SegmentResponse,
} from './types.js';

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, detail: string) {
    super(detail);
    this.name = 'ApiError';
    this.status = status;
  }
}

export const isAbortError = (err: unknown): boolean =>
  err instanceof DOMException && err.name === 'AbortError';

/**
 * Thin fetch client for the segmentation service. At most one POST is in
 * flight at a time: issuing a new request aborts the previous one, so a
 * rapid re-run never races an older answer onto the screen.
 */
export class ApiClient {
  private baseUrl: string;
  private inflight: AbortController | null = null;

  constructor(baseUrl = '') {
    this.baseUrl = baseUrl.replace(/\/+$/, '');
  }

  async health(): Promise<boolean> {
    try {
      const res = await fetch(this.baseUrl + '/health');
      return res.ok;
    } catch {
      return false;
    }
  }

  segment(req: SegmentRequest): Promise<SegmentResponse> {
    return this.post<SegmentResponse>('/segment', req);
  }

  autoseed(req: AutoseedRequest): Promise<AutoseedResponse> {
    return this.post<AutoseedResponse>('/autoseed', req);
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    if (this.inflight) {
      this.inflight.abort();
    }
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const res = await fetch(this.baseUrl + path, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(body),
        signal: controller.signal,
      });
      if (!res.ok) {
        const detail = await res
          .json()
          .then((data) => String(data?.detail ?? res.statusText))
          .catch(() => res.statusText);
        throw new ApiError(res.status, detail);
      }
      return (await res.json()) as T;
    } finally {
      if (this.inflight === controller) {
        this.inflight = null;
      }
    }
  }
}
