/** Response shapes of the HTTP API (mirrors the served JSON schema). */

export interface TreeNode {
  id: string;
  time: number;
  branch_length: number | null;
  children: TreeNode[];
}

export interface TraitDef {
  name: string;
  kind: "continuous" | "discrete";
  states: string[];
}

export interface DatasetSummary {
  leaves: number;
  internal_count: number;
  present_time: number;
  trait_defs: TraitDef[];
  tree: TreeNode;
}

export interface Selection {
  name: string;
  origin: "clade" | "trait_filter" | "brush";
  label: string;
  mrca: string;
  leaf_ids: string[];
  induced_nodes: string[];
  color_key: string | null;
}

export interface StateLane {
  probabilities: number[];
  mean: number;
  jitter: number[];
}

export interface BinSummary {
  bin: number;
  trait: string;
  node_ids: string[];
  outliers: string[];
  intervals: [number, number, number][] | null;
  kde: { x: number[]; density: number[] } | null;
  histogram: { edges: number[]; counts: number[] } | null;
  states: Record<string, StateLane> | null;
}

export interface BinsResponse {
  edges: number[];
  leaf_bin: number;
  internal_assignment: Record<string, number>;
  summaries: Record<string, BinSummary[]>;
}

export interface TrajectorySample {
  time: number;
  estimate: number;
  lower: number;
  upper: number;
}

export interface Trajectory {
  leaf: string;
  samples: TrajectorySample[];
}

export interface HeatmapCell {
  top1pct: boolean;
  rank: number;
  saturation: number;
}

export interface RankedPair {
  pair: [string, string];
  score: number;
  rank: number;
  desirabilities: Record<string, number>;
  metrics: {
    distance_time: number;
    topo_edges: number;
    delta: number;
    closeness: number;
  };
  heatmap: Record<string, HeatmapCell>;
  top_rank_frequency: number;
  trajectories: [Trajectory, Trajectory];
}

export interface RankResponse {
  trait: string;
  total_pairs: number;
  pairs: RankedPair[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail: unknown;
}

export type MetricName = "distance" | "delta" | "closeness";
export type Target = "high" | "low" | "ignore";

export interface QuerySpec {
  trait: string;
  preset: string | null;
  targets: Record<MetricName, Target>;
  weights: Record<MetricName, number>;
  alpha: number;
  min_distance: number;
}
