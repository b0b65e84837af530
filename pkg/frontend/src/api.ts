/** Thin typed client over the JSON API.
 *
 * Ranking requests go through a latest-wins gate: every call gets a
 * monotonically increasing id and a response is delivered only if no newer
 * request has been issued since, so slow responses can never overwrite the
 * result of a later query.
 */

import type {
  ApiErrorBody,
  BinsResponse,
  DatasetSummary,
  RankResponse,
  Selection,
} from "./types";

export class ApiError extends Error {
  constructor(public status: number, public body: ApiErrorBody) {
    super(body.message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function asJson<T>(resp: Response): Promise<T> {
  const body = await resp.json();
  if (!resp.ok) {
    throw new ApiError(resp.status, body as ApiErrorBody);
  }
  return body as T;
}

export class ApiClient {
  private rankCounter = 0;
  private rankDelivered = 0;

  constructor(
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
    private base = "",
  ) {}

  private post(url: string, body: unknown): Promise<Response> {
    return this.fetchImpl(this.base + url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getDataset(): Promise<DatasetSummary> {
    return this.fetchImpl(this.base + "/api/dataset").then((r) =>
      asJson<DatasetSummary>(r),
    );
  }

  postSelection(body: Record<string, unknown>): Promise<Selection> {
    return this.post("/api/selection", body).then((r) => asJson<Selection>(r));
  }

  postBins(body: Record<string, unknown>): Promise<BinsResponse> {
    return this.post("/api/bins", body).then((r) => asJson<BinsResponse>(r));
  }

  /** Rank with staleness discard: resolves null for superseded requests. */
  async postRank(body: Record<string, unknown>): Promise<RankResponse | null> {
    const id = ++this.rankCounter;
    const resp = await this.post("/api/pattern/rank", body);
    if (id < this.rankCounter || id <= this.rankDelivered) {
      return null; // a newer request exists or already delivered
    }
    const result = await asJson<RankResponse>(resp);
    if (id < this.rankCounter || id <= this.rankDelivered) {
      return null;
    }
    this.rankDelivered = id;
    return result;
  }
}

/** Trailing-edge debounce; rapid calls collapse into one after `ms`. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  ms: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | null = null;
  return (...args: A) => {
    if (timer !== null) {
      clearTimeout(timer);
    }
    timer = setTimeout(() => {
      timer = null;
      fn(...args);
    }, ms);
  };
}
