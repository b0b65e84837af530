/** Binned trait view: one column per trait, one cell per time bin.
 *
 * Internal bins of continuous traits show CI whisker marks over a KDE area;
 * the leaf bin shows a histogram.  Discrete traits render one dot lane per
 * state with the per-state mean as a horizontal line.  Outliers in the leaf
 * bin are click-brushable; the emitted leaf set is exactly the outlier list
 * from the response (no client-side recomputation).
 */

import * as d3 from "d3";

import type { BinSummary, BinsResponse } from "./types";

export interface TraitViewOptions {
  cellWidth?: number;
  cellHeight?: number;
  onOutlierBrush?: (leafIds: string[]) => void;
}

const PALETTE = d3.schemeTableau10;

function extentOf(summary: BinSummary): [number, number] {
  const values: number[] = [];
  if (summary.intervals) {
    for (const [, lo, hi] of summary.intervals) values.push(lo, hi);
  }
  if (summary.kde) values.push(...summary.kde.x);
  if (summary.histogram) values.push(...summary.histogram.edges);
  if (values.length === 0) return [0, 1];
  return [Math.min(...values), Math.max(...values)];
}

export class TraitView {
  constructor(
    private container: HTMLElement,
    private options: TraitViewOptions = {},
  ) {}

  render(bins: BinsResponse): void {
    const root = d3.select(this.container);
    root.selectAll("*").remove();
    const traits = Object.keys(bins.summaries);
    if (traits.length === 0 || bins.summaries[traits[0]].length === 0) {
      root
        .append("div")
        .attr("class", "empty-state")
        .text("No selection yet. Brush leaves in the tree to begin.");
      return;
    }
    const row = root.append("div").attr("class", "trait-columns");
    for (const trait of traits) {
      const column = row.append("div").attr("class", "trait-column");
      column.append("h3").text(trait);
      for (const summary of bins.summaries[trait]) {
        this.renderCell(column, summary, summary.bin === bins.leaf_bin);
      }
    }
  }

  private renderCell(
    column: d3.Selection<HTMLDivElement, unknown, null, undefined>,
    summary: BinSummary,
    isLeafBin: boolean,
  ): void {
    const width = this.options.cellWidth ?? 180;
    const height = this.options.cellHeight ?? 72;
    const cell = column
      .append("div")
      .attr("class", "bin-cell")
      .attr("data-bin", summary.bin);
    cell
      .append("span")
      .attr("class", "bin-caption")
      .text(isLeafBin ? "leaves" : `bin ${summary.bin}`);
    if (summary.node_ids.length === 0) {
      cell.append("span").attr("class", "empty-bin-glyph").text("∅");
      return;
    }
    const svg = cell
      .append("svg")
      .attr("width", width)
      .attr("height", height);
    if (summary.states !== null) {
      this.renderDotLanes(svg, summary, width, height);
    } else if (summary.histogram !== null) {
      this.renderHistogram(svg, summary, width, height);
    } else {
      this.renderIntervalKde(svg, summary, width, height);
    }
  }

  private renderIntervalKde(
    svg: d3.Selection<SVGSVGElement, unknown, null, undefined>,
    summary: BinSummary,
    width: number,
    height: number,
  ): void {
    const x = d3.scaleLinear().domain(extentOf(summary)).range([4, width - 4]);
    if (summary.kde) {
      const yMax = Math.max(...summary.kde.density, 1e-12);
      const y = d3.scaleLinear().domain([0, yMax]).range([height - 4, 14]);
      const area = d3
        .area<number>()
        .x((_, i) => x(summary.kde!.x[i]))
        .y0(height - 4)
        .y1((d) => y(d));
      svg
        .append("path")
        .attr("class", "kde-area")
        .attr("d", area(summary.kde.density) ?? "")
        .attr("fill", "#9ecae1");
    }
    const rows = summary.intervals ?? [];
    svg
      .append("g")
      .selectAll("line")
      .data(rows)
      .join("line")
      .attr("class", "ci-mark")
      .attr("x1", (d) => x(d[1]))
      .attr("x2", (d) => x(d[2]))
      .attr("y1", (_, i) => 6 + (i % 4) * 2)
      .attr("y2", (_, i) => 6 + (i % 4) * 2)
      .attr("stroke", "#333");
  }

  private renderHistogram(
    svg: d3.Selection<SVGSVGElement, unknown, null, undefined>,
    summary: BinSummary,
    width: number,
    height: number,
  ): void {
    const { edges, counts } = summary.histogram!;
    const x = d3
      .scaleLinear()
      .domain([edges[0], edges[edges.length - 1]])
      .range([4, width - 4]);
    const y = d3
      .scaleLinear()
      .domain([0, Math.max(...counts, 1)])
      .range([height - 4, 6]);
    svg
      .append("g")
      .selectAll("rect")
      .data(counts)
      .join("rect")
      .attr("class", "hist-bar")
      .attr("x", (_, i) => x(edges[i]) + 0.5)
      .attr("width", (_, i) => Math.max(1, x(edges[i + 1]) - x(edges[i]) - 1))
      .attr("y", (d) => y(d))
      .attr("height", (d) => height - 4 - y(d))
      .attr("fill", "#4c78a8");
    if (summary.outliers.length > 0) {
      const onBrush = this.options.onOutlierBrush;
      const flag = svg
        .append("text")
        .attr("class", "outlier-flag")
        .attr("x", width - 6)
        .attr("y", 12)
        .attr("text-anchor", "end")
        .text(`${summary.outliers.length} outlier(s)`);
      if (onBrush) {
        flag.style("cursor", "pointer").on("click", () => {
          onBrush([...summary.outliers]);
        });
      }
    }
  }

  private renderDotLanes(
    svg: d3.Selection<SVGSVGElement, unknown, null, undefined>,
    summary: BinSummary,
    width: number,
    height: number,
  ): void {
    const states = Object.keys(summary.states!);
    const laneHeight = height / states.length;
    const x = d3.scaleLinear().domain([0, 1]).range([4, width - 4]);
    states.forEach((state, si) => {
      const lane = summary.states![state];
      const cy = (si + 0.5) * laneHeight;
      const g = svg.append("g").attr("class", "state-lane").attr("data-state", state);
      g.selectAll("circle")
        .data(lane.probabilities)
        .join("circle")
        .attr("cx", (d) => x(d))
        .attr("cy", (_, i) => cy + lane.jitter[i] * laneHeight)
        .attr("r", 2.2)
        .attr("fill", PALETTE[si % PALETTE.length])
        .attr("fill-opacity", 0.7);
      g.append("line")
        .attr("class", "state-mean")
        .attr("x1", x(lane.mean))
        .attr("x2", x(lane.mean))
        .attr("y1", cy - laneHeight * 0.45)
        .attr("y2", cy + laneHeight * 0.45)
        .attr("stroke", PALETTE[si % PALETTE.length]);
      g.append("text")
        .attr("class", "state-label")
        .attr("x", 4)
        .attr("y", cy - laneHeight * 0.3)
        .text(state);
    });
  }
}
