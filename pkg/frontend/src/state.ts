/** ViewState and its URL-fragment serialization.
 *
 * The whole analysis session (selection, trait, bin count, pattern query)
 * round-trips through location.hash so sessions are shareable links.
 */

import type { MetricName, QuerySpec, Target } from "./types";

export interface ViewState {
  selection: string | null;
  trait: string | null;
  k: number;
  colorKey: string | null;
  query: QuerySpec | null;
  sortByFrequency: boolean;
}

export const METRICS: MetricName[] = ["distance", "delta", "closeness"];

export const PRESETS: { id: string; label: string; targets: Target[] }[] = [
  { id: "convergence", label: "Convergence", targets: ["high", "high", "low"] },
  { id: "deep_divergence", label: "Deep divergence", targets: ["high", "high", "high"] },
  { id: "ancient_stasis", label: "Ancient stasis", targets: ["high", "low", "low"] },
  { id: "recent_rapid_divergence", label: "Recent rapid divergence", targets: ["low", "high", "high"] },
  { id: "transient_excursion", label: "Transient excursion", targets: ["low", "high", "low"] },
  { id: "recent_stasis", label: "Recent stasis", targets: ["low", "low", "low"] },
];

export function defaultState(): ViewState {
  return {
    selection: null,
    trait: null,
    k: 8,
    colorKey: null,
    query: null,
    sortByFrequency: false,
  };
}

export function presetQuery(presetId: string, trait: string): QuerySpec {
  const preset = PRESETS.find((p) => p.id === presetId);
  if (preset === undefined) {
    throw new Error(`unknown preset ${presetId}`);
  }
  const targets = {} as Record<MetricName, Target>;
  METRICS.forEach((m, i) => {
    targets[m] = preset.targets[i];
  });
  return {
    trait,
    preset: presetId,
    targets,
    weights: { distance: 1, delta: 1, closeness: 1 },
    alpha: 0.5,
    min_distance: 0,
  };
}

/** Outgoing /api/pattern/rank body; weight 0 means target "ignore". */
export function rankRequestBody(query: QuerySpec, top: number) {
  const targets: Record<string, Target> = {};
  for (const m of METRICS) {
    targets[m] = query.weights[m] === 0 ? "ignore" : query.targets[m];
  }
  return {
    query: {
      trait: query.trait,
      preset: query.preset,
      targets,
      weights: query.weights,
      alpha: query.alpha,
      min_distance: query.min_distance,
    },
    top,
  };
}

export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.selection !== null) params.set("sel", state.selection);
  if (state.trait !== null) params.set("trait", state.trait);
  params.set("k", String(state.k));
  if (state.colorKey !== null) params.set("color", state.colorKey);
  if (state.sortByFrequency) params.set("sort", "freq");
  if (state.query !== null) {
    const q = state.query;
    params.set("qt", q.trait);
    if (q.preset !== null) params.set("preset", q.preset);
    params.set("targets", METRICS.map((m) => q.targets[m][0]).join(""));
    params.set("weights", METRICS.map((m) => String(q.weights[m])).join(","));
    params.set("alpha", String(q.alpha));
    params.set("mind", String(q.min_distance));
  }
  return "#" + params.toString();
}

const TARGET_BY_LETTER: Record<string, Target> = {
  h: "high",
  l: "low",
  i: "ignore",
};

export function decodeState(fragment: string): ViewState {
  const state = defaultState();
  const params = new URLSearchParams(fragment.replace(/^#/, ""));
  state.selection = params.get("sel");
  state.trait = params.get("trait");
  const k = Number(params.get("k"));
  if (Number.isInteger(k) && k >= 1 && k <= 32) state.k = k;
  state.colorKey = params.get("color");
  state.sortByFrequency = params.get("sort") === "freq";
  const qt = params.get("qt");
  if (qt !== null) {
    const letters = params.get("targets") ?? "hhl";
    const weights = (params.get("weights") ?? "1,1,1").split(",").map(Number);
    const targets = {} as Record<MetricName, Target>;
    const weightMap = {} as Record<MetricName, number>;
    METRICS.forEach((m, i) => {
      targets[m] = TARGET_BY_LETTER[letters[i]] ?? "high";
      weightMap[m] = Number.isFinite(weights[i]) ? weights[i] : 1;
    });
    state.query = {
      trait: qt,
      preset: params.get("preset"),
      targets,
      weights: weightMap,
      alpha: Number(params.get("alpha") ?? 0.5),
      min_distance: Number(params.get("mind") ?? 0),
    };
  }
  return state;
}
