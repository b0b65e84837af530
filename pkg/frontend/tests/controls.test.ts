import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { QueryControls } from "../src/controls";
import type { QuerySpec } from "../src/types";
import { DATASET } from "./fixtures";

let container: HTMLElement;

beforeEach(() => {
  vi.useFakeTimers();
  container = document.createElement("div");
  document.body.appendChild(container);
});

afterEach(() => {
  vi.useRealTimers();
});

function build(onChange: (q: QuerySpec) => void): QueryControls {
  return new QueryControls(container, DATASET.trait_defs, { onChange });
}

function setSelect(selector: string, value: string): void {
  const el = container.querySelector<HTMLSelectElement>(selector)!;
  el.value = value;
  el.dispatchEvent(new Event("change", { bubbles: true }));
}

function setRange(selector: string, value: string): void {
  const el = container.querySelector<HTMLInputElement>(selector)!;
  el.value = value;
  el.dispatchEvent(new Event("input", { bubbles: true }));
}

describe("QueryControls", () => {
  it("starts from the convergence preset on the first continuous trait", () => {
    const controls = build(() => {});
    expect(controls.query.trait).toBe("svl");
    expect(controls.query.preset).toBe("convergence");
    const traitOptions = [
      ...container.querySelectorAll('select[data-control="trait"] option'),
    ].map((o) => (o as HTMLOptionElement).value);
    // discrete traits are not offered for ranking
    expect(traitOptions).toEqual(["svl", "mass"]);
  });

  it("debounces a burst of edits into a single onChange", () => {
    const onChange = vi.fn();
    build(onChange);
    setSelect('select[data-control="preset"]', "ancient_stasis");
    vi.advanceTimersByTime(100);
    setSelect('select[data-control="preset"]', "recent_stasis");
    vi.advanceTimersByTime(249);
    expect(onChange).not.toHaveBeenCalled();
    vi.advanceTimersByTime(1);
    expect(onChange).toHaveBeenCalledTimes(1);
    expect(onChange.mock.calls[0][0].preset).toBe("recent_stasis");
    expect(onChange.mock.calls[0][0].targets).toEqual({
      distance: "low",
      delta: "low",
      closeness: "low",
    });
  });

  it("syncs the target selects when a preset is chosen", () => {
    build(() => {});
    setSelect('select[data-control="preset"]', "transient_excursion");
    const values = ["distance", "delta", "closeness"].map(
      (m) =>
        container.querySelector<HTMLSelectElement>(
          `select[data-target="${m}"]`,
        )!.value,
    );
    expect(values).toEqual(["low", "high", "low"]);
  });

  it("drops the preset tag once a target is edited by hand", () => {
    const onChange = vi.fn();
    const controls = build(onChange);
    setSelect('select[data-target="delta"]', "ignore");
    vi.advanceTimersByTime(250);
    expect(controls.query.preset).toBeNull();
    expect(controls.query.targets.delta).toBe("ignore");
    // the other targets keep their preset values
    expect(controls.query.targets.distance).toBe("high");
  });

  it("drops the preset tag once a weight is edited by hand", () => {
    const controls = build(() => {});
    setRange('input[data-weight="closeness"]', "0");
    vi.advanceTimersByTime(250);
    expect(controls.query.preset).toBeNull();
    expect(controls.query.weights.closeness).toBe(0);
  });

  it("updates alpha from its slider", () => {
    const controls = build(() => {});
    setRange('input[data-control="alpha"]', "0.85");
    vi.advanceTimersByTime(250);
    expect(controls.query.alpha).toBe(0.85);
  });

  it("shows and clears inline API errors", () => {
    const controls = build(() => {});
    controls.showError("KIND_MISMATCH", "trait is not continuous");
    expect(container.querySelector(".api-error")!.textContent).toBe(
      "KIND_MISMATCH: trait is not continuous",
    );
    setSelect('select[data-control="trait"]', "mass");
    expect(container.querySelector(".api-error")!.textContent).toBe("");
  });

  it("refuses datasets without a continuous trait", () => {
    expect(
      () =>
        new QueryControls(
          container,
          [{ name: "island", kind: "discrete", states: ["a", "b"] }],
          { onChange: () => {} },
        ),
    ).toThrow(/continuous/);
  });
});
