/** Canned API payloads matching the documented JSON contract, plus a
 * fetch stand-in that serves them and records every request. */

import type {
  BinsResponse,
  DatasetSummary,
  RankResponse,
  RankedPair,
} from "../src/types";
import type { FetchLike } from "../src/api";

export const DATASET: DatasetSummary = {
  leaves: 4,
  internal_count: 3,
  present_time: 2,
  trait_defs: [
    { name: "svl", kind: "continuous", states: [] },
    { name: "mass", kind: "continuous", states: [] },
    { name: "island", kind: "discrete", states: ["Cuba", "Hispaniola"] },
  ],
  tree: {
    id: "R",
    time: 0,
    branch_length: null,
    children: [
      {
        id: "N1",
        time: 1,
        branch_length: 1,
        children: [
          { id: "A", time: 2, branch_length: 1, children: [] },
          { id: "B", time: 2, branch_length: 1, children: [] },
        ],
      },
      {
        id: "N2",
        time: 0.5,
        branch_length: 0.5,
        children: [
          { id: "C", time: 2, branch_length: 1.5, children: [] },
          { id: "D", time: 2, branch_length: 1.5, children: [] },
        ],
      },
    ],
  },
};

export const BINS: BinsResponse = {
  edges: [0, 1, 2],
  leaf_bin: 2,
  internal_assignment: { R: 0, N2: 0, N1: 1 },
  summaries: {
    svl: [
      {
        bin: 0,
        trait: "svl",
        node_ids: ["R", "N2"],
        outliers: [],
        intervals: [
          [10, 8, 12],
          [8, 6, 10],
        ],
        kde: { x: [6, 8, 10, 12], density: [0.05, 0.2, 0.2, 0.05] },
        histogram: null,
        states: null,
      },
      {
        bin: 1,
        trait: "svl",
        node_ids: [],
        outliers: [],
        intervals: null,
        kde: null,
        histogram: null,
        states: null,
      },
      {
        bin: 2,
        trait: "svl",
        node_ids: ["A", "B", "C", "D"],
        outliers: ["D"],
        intervals: [
          [14, 14, 14],
          [13, 13, 13],
          [6, 6, 6],
          [7, 7, 7],
        ],
        kde: null,
        histogram: { edges: [6, 10, 14], counts: [2, 2] },
        states: null,
      },
    ],
    island: [
      {
        bin: 0,
        trait: "island",
        node_ids: ["R", "N2"],
        outliers: [],
        intervals: null,
        kde: null,
        histogram: null,
        states: {
          Cuba: { probabilities: [0.5, 0.2], mean: 0.35, jitter: [0.1, -0.2] },
          Hispaniola: {
            probabilities: [0.5, 0.8],
            mean: 0.65,
            jitter: [-0.05, 0.3],
          },
        },
      },
      {
        bin: 1,
        trait: "island",
        node_ids: [],
        outliers: [],
        intervals: null,
        kde: null,
        histogram: null,
        states: null,
      },
      {
        bin: 2,
        trait: "island",
        node_ids: ["A", "B", "C", "D"],
        outliers: [],
        intervals: null,
        kde: null,
        histogram: null,
        states: {
          Cuba: {
            probabilities: [1, 1, 0, 0],
            mean: 0.5,
            jitter: [0.1, 0.2, -0.1, -0.3],
          },
          Hispaniola: {
            probabilities: [0, 0, 1, 1],
            mean: 0.5,
            jitter: [0.3, -0.2, 0.15, 0.05],
          },
        },
      },
    ],
  },
};

function pair(
  a: string,
  b: string,
  rank: number,
  score: number,
  freq: number,
): RankedPair {
  return {
    pair: [a, b],
    score,
    rank,
    desirabilities: { distance: 0.8, delta: 0.9, closeness: 0.7 },
    metrics: { distance_time: 2, topo_edges: 4, delta: 8, closeness: 1 },
    heatmap: {
      svl: { top1pct: rank === 1, rank, saturation: 1 - (rank - 1) / 6 },
      mass: { top1pct: false, rank: rank + 1, saturation: 0.5 },
    },
    top_rank_frequency: freq,
    trajectories: [
      {
        leaf: a,
        samples: [
          { time: 0, estimate: 10, lower: 8, upper: 12 },
          { time: 1, estimate: 12, lower: 10, upper: 14 },
          { time: 2, estimate: 14, lower: 14, upper: 14 },
        ],
      },
      {
        leaf: b,
        samples: [
          { time: 0, estimate: 10, lower: 8, upper: 12 },
          { time: 0.5, estimate: 8, lower: 6, upper: 10 },
          { time: 2, estimate: 6, lower: 6, upper: 6 },
        ],
      },
    ],
  };
}

export const RANK: RankResponse = {
  trait: "svl",
  total_pairs: 6,
  pairs: [
    pair("A", "C", 1, 0.91, 1),
    pair("A", "D", 2, 0.84, 0),
    pair("B", "C", 3, 0.7, 2),
  ],
};

export interface RecordedRequest {
  url: string;
  body: unknown;
}

export function makeMockFetch(
  overrides: Partial<Record<string, unknown>> = {},
): { fetchImpl: FetchLike; requests: RecordedRequest[] } {
  const requests: RecordedRequest[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    const body = init?.body ? JSON.parse(init.body as string) : null;
    requests.push({ url, body });
    const respond = (status: number, payload: unknown) =>
      new Response(JSON.stringify(payload), {
        status,
        headers: { "content-type": "application/json" },
      });
    if (url.endsWith("/api/dataset")) {
      return respond(200, overrides.dataset ?? DATASET);
    }
    if (url.endsWith("/api/selection")) {
      return respond(200, {
        name: body.name,
        origin: body.origin,
        label: "brush",
        mrca: "R",
        leaf_ids: [...body.leaf_ids].sort(),
        induced_nodes: ["N1", "N2", "R"],
        color_key: body.color_key ?? null,
      });
    }
    if (url.endsWith("/api/bins")) {
      return respond(200, overrides.bins ?? BINS);
    }
    if (url.endsWith("/api/pattern/rank")) {
      if (body.query.trait === "region-bad") {
        return respond(422, {
          code: "KIND_MISMATCH",
          message: "trait is not continuous",
          detail: null,
        });
      }
      return respond(200, overrides.rank ?? RANK);
    }
    return respond(404, { code: "NOT_FOUND", message: url, detail: null });
  };
  return { fetchImpl, requests };
}
