/** Ranked pair cards for the pattern view.
 *
 * Each card plots the two trajectories from the MRCA: a line for the
 * estimate over an area band for the confidence interval, ancestor
 * rectangles sized by CI width, a delta annotation at the time where the
 * trajectory gap is widest, and a per-trait heatmap strip whose saturation
 * comes straight from the API.  Every displayed number is an API field.
 */

import * as d3 from "d3";

import type { RankedPair, RankResponse, Trajectory } from "./types";

const COLORS = ["#e4572e", "#17449b"];

export interface PatternViewOptions {
  plotWidth?: number;
  plotHeight?: number;
}

/** Time of the widest gap between the two piecewise-linear estimates. */
export function deltaArgmaxTime(a: Trajectory, b: Trajectory): number {
  const times = [
    ...a.samples.map((s) => s.time),
    ...b.samples.map((s) => s.time),
  ].sort((p, q) => p - q);
  const evalAt = (traj: Trajectory, t: number): number => {
    const s = traj.samples;
    if (t >= s[s.length - 1].time) return s[s.length - 1].estimate;
    let i = 0;
    while (i + 1 < s.length && s[i + 1].time <= t) i++;
    if (s[i].time === t) return s[i].estimate;
    const frac = (t - s[i].time) / (s[i + 1].time - s[i].time);
    return s[i].estimate + frac * (s[i + 1].estimate - s[i].estimate);
  };
  let best = times[0];
  let bestGap = -Infinity;
  for (const t of times) {
    const gap = Math.abs(evalAt(a, t) - evalAt(b, t));
    if (gap > bestGap) {
      bestGap = gap;
      best = t;
    }
  }
  return best;
}

export class PatternView {
  constructor(
    private container: HTMLElement,
    private options: PatternViewOptions = {},
  ) {}

  render(response: RankResponse, ordered?: RankedPair[]): void {
    const root = d3.select(this.container);
    root.selectAll("*").remove();
    const pairs = ordered ?? response.pairs;
    root
      .append("div")
      .attr("class", "rank-header")
      .text(
        `${response.total_pairs} pairs scored on ${response.trait}; ` +
          `showing ${pairs.length}`,
      );
    if (pairs.length === 0) {
      root.append("div").attr("class", "empty-state").text("no pairs");
      return;
    }
    for (const pair of pairs) {
      this.renderCard(root, pair);
    }
  }

  private renderCard(
    root: d3.Selection<HTMLElement, unknown, null, undefined>,
    pair: RankedPair,
  ): void {
    const width = this.options.plotWidth ?? 260;
    const height = this.options.plotHeight ?? 110;
    const card = root
      .append("div")
      .attr("class", "pair-card")
      .attr("data-pair", pair.pair.join("|"));
    card
      .append("div")
      .attr("class", "pair-title")
      .text(
        `#${pair.rank} ${pair.pair[0]} / ${pair.pair[1]} ` +
          `score ${pair.score.toFixed(4)}`,
      );

    const [ta, tb] = pair.trajectories;
    const allSamples = [...ta.samples, ...tb.samples];
    const x = d3
      .scaleLinear()
      .domain(d3.extent(allSamples, (s) => s.time) as [number, number])
      .range([6, width - 6]);
    const y = d3
      .scaleLinear()
      .domain([
        Math.min(...allSamples.map((s) => s.lower)),
        Math.max(...allSamples.map((s) => s.upper)),
      ])
      .nice()
      .range([height - 8, 8]);

    const svg = card
      .append("svg")
      .attr("class", "pair-plot")
      .attr("width", width)
      .attr("height", height);

    pair.trajectories.forEach((traj, ti) => {
      const color = COLORS[ti];
      const band = d3
        .area<Trajectory["samples"][number]>()
        .x((s) => x(s.time))
        .y0((s) => y(s.lower))
        .y1((s) => y(s.upper));
      svg
        .append("path")
        .attr("class", "ci-band")
        .attr("d", band(traj.samples) ?? "")
        .attr("fill", color)
        .attr("fill-opacity", 0.18);
      const line = d3
        .line<Trajectory["samples"][number]>()
        .x((s) => x(s.time))
        .y((s) => y(s.estimate));
      svg
        .append("path")
        .attr("class", "trajectory-line")
        .attr("d", line(traj.samples) ?? "")
        .attr("fill", "none")
        .attr("stroke", color);
      // ancestor rectangles sized by CI width (leaf sample excluded)
      svg
        .append("g")
        .selectAll("rect")
        .data(traj.samples.slice(0, -1))
        .join("rect")
        .attr("class", "ancestor-rect")
        .attr("x", (s) => x(s.time) - 2)
        .attr("width", 4)
        .attr("y", (s) => y(s.upper))
        .attr("height", (s) => Math.max(1, y(s.lower) - y(s.upper)))
        .attr("fill", color)
        .attr("fill-opacity", 0.45);
    });

    const tDelta = deltaArgmaxTime(ta, tb);
    svg
      .append("line")
      .attr("class", "delta-marker")
      .attr("x1", x(tDelta))
      .attr("x2", x(tDelta))
      .attr("y1", 4)
      .attr("y2", height - 4)
      .attr("stroke", "#999")
      .attr("stroke-dasharray", "3,2");
    svg
      .append("text")
      .attr("class", "delta-label")
      .attr("x", Math.min(x(tDelta) + 3, width - 48))
      .attr("y", 12)
      .text(`Δ ${pair.metrics.delta.toFixed(3)}`);

    // heatmap strip: one cell per continuous trait, API saturation
    const strip = card.append("div").attr("class", "heatmap-strip");
    for (const [trait, cell] of Object.entries(pair.heatmap)) {
      strip
        .append("span")
        .attr("class", "heatmap-cell" + (cell.top1pct ? " top1" : ""))
        .attr("title", `${trait}: rank ${cell.rank}`)
        .style(
          "background-color",
          d3.interpolateBlues(cell.saturation),
        );
    }
    card
      .append("div")
      .attr("class", "pair-meta")
      .text(
        `delta ${pair.metrics.delta.toFixed(3)} · ` +
          `closeness ${pair.metrics.closeness.toFixed(3)} · ` +
          `top-ranked in ${pair.top_rank_frequency} trait(s)`,
      );
  }
}

/** Client-side reorder toggle; mirrors the server's rank-frequency sort. */
export function byTopRankFrequency(pairs: RankedPair[]): RankedPair[] {
  return [...pairs].sort((a, b) => {
    if (a.top_rank_frequency !== b.top_rank_frequency) {
      return b.top_rank_frequency - a.top_rank_frequency;
    }
    if (a.score !== b.score) return b.score - a.score;
    const pa = a.pair.join("|");
    const pb = b.pair.join("|");
    return pa < pb ? -1 : pa > pb ? 1 : 0;
  });
}
