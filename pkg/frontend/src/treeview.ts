/** Rectangular phylogenetic tree with leaf brushing.
 *
 * x is evolutionary time (root at the left, present at the right), y is an
 * even leaf ladder.  Dragging over the leaf labels brushes a leaf set and
 * fires the callback that registers it as a server-side selection.
 */

import * as d3 from "d3";

import type { DatasetSummary, TreeNode } from "./types";

export interface TreeViewOptions {
  width?: number;
  rowHeight?: number;
  onBrush?: (leafIds: string[]) => void;
}

interface Laid {
  node: TreeNode;
  x: number;
  y: number;
}

function layout(
  root: TreeNode,
  xScale: (t: number) => number,
): { nodes: Laid[]; leaves: Laid[] } {
  const nodes: Laid[] = [];
  const leaves: Laid[] = [];
  let nextRow = 0;
  const place = (node: TreeNode): number => {
    let y: number;
    if (node.children.length === 0) {
      y = nextRow++;
    } else {
      const ys = node.children.map(place);
      y = (ys[0] + ys[ys.length - 1]) / 2;
    }
    const laid = { node, x: xScale(node.time), y };
    nodes.push(laid);
    if (node.children.length === 0) leaves.push(laid);
    return y;
  };
  place(root);
  leaves.sort((a, b) => a.y - b.y);
  return { nodes, leaves };
}

export class TreeView {
  private highlighted = new Set<string>();

  constructor(
    private container: HTMLElement,
    private options: TreeViewOptions = {},
  ) {}

  render(dataset: DatasetSummary): void {
    const width = this.options.width ?? 480;
    const rowHeight = this.options.rowHeight ?? 14;
    const margin = { top: 8, right: 110, bottom: 20, left: 8 };
    const height = dataset.leaves * rowHeight + margin.top + margin.bottom;
    const xScale = d3
      .scaleLinear()
      .domain([dataset.tree.time, dataset.present_time])
      .range([margin.left, width - margin.right]);
    const { nodes, leaves } = layout(dataset.tree, (t) => xScale(t));
    const rowY = (row: number) => margin.top + (row + 0.5) * rowHeight;

    const sel = d3.select(this.container);
    sel.selectAll("*").remove();
    const svg = sel
      .append("svg")
      .attr("class", "tree-view")
      .attr("width", width)
      .attr("height", height);

    const byId = new Map(nodes.map((n) => [n.node.id, n]));
    const edges: { parent: Laid; child: Laid }[] = [];
    for (const laid of nodes) {
      for (const child of laid.node.children) {
        edges.push({ parent: laid, child: byId.get(child.id)! });
      }
    }
    svg
      .append("g")
      .selectAll("path")
      .data(edges)
      .join("path")
      .attr("class", "edge")
      .attr("d", (e) => {
        const py = rowY(e.parent.y);
        const cy = rowY(e.child.y);
        return `M${e.parent.x},${py}V${cy}H${e.child.x}`;
      })
      .attr("fill", "none")
      .attr("stroke", "#666");

    svg
      .append("g")
      .selectAll("text")
      .data(leaves)
      .join("text")
      .attr("class", "leaf-label")
      .attr("data-leaf", (l) => l.node.id)
      .attr("x", (l) => l.x + 4)
      .attr("y", (l) => rowY(l.y) + 3)
      .text((l) => l.node.id);

    // time axis along the bottom
    svg
      .append("g")
      .attr("class", "time-axis")
      .attr("transform", `translate(0,${height - margin.bottom + 4})`)
      .call(d3.axisBottom(xScale).ticks(5) as never);

    // vertical brush over the leaf ladder
    const brush = d3
      .brushY()
      .extent([
        [width - margin.right, margin.top],
        [width, height - margin.bottom],
      ])
      .on("end", (event: d3.D3BrushEvent<unknown>) => {
        if (!event.selection) return;
        const [y0, y1] = event.selection as [number, number];
        const picked = leaves
          .filter((l) => rowY(l.y) >= y0 && rowY(l.y) <= y1)
          .map((l) => l.node.id);
        this.setHighlight(picked);
        if (picked.length > 0 && this.options.onBrush) {
          this.options.onBrush(picked);
        }
      });
    svg.append("g").attr("class", "leaf-brush").call(brush as never);
  }

  setHighlight(leafIds: string[]): void {
    this.highlighted = new Set(leafIds);
    const picked = this.highlighted;
    d3.select(this.container)
      .selectAll<SVGTextElement, unknown>(".leaf-label")
      .classed("highlighted", function () {
        const id = this.getAttribute("data-leaf");
        return id !== null && picked.has(id);
      });
  }
}
