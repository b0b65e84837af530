/** Pattern query control panel.
 *
 * Preset dropdown, per-metric target and weight controls, alpha slider and
 * trait selector.  Any change funnels through a 250 ms debounce into a
 * single onChange callback; the caller issues the rank request.  API errors
 * surface inline under the panel.
 */

import { debounce } from "./api";
import { METRICS, PRESETS, presetQuery } from "./state";
import type { MetricName, QuerySpec, Target, TraitDef } from "./types";

export const DEBOUNCE_MS = 250;

export interface ControlsOptions {
  onChange: (query: QuerySpec) => void;
  debounceMs?: number;
}

export class QueryControls {
  query: QuerySpec;
  private emit: (query: QuerySpec) => void;
  private errorBox!: HTMLElement;

  constructor(
    private container: HTMLElement,
    traitDefs: TraitDef[],
    options: ControlsOptions,
  ) {
    const continuous = traitDefs.filter((t) => t.kind === "continuous");
    if (continuous.length === 0) {
      throw new Error("dataset has no continuous trait");
    }
    this.query = presetQuery("convergence", continuous[0].name);
    this.emit = debounce(
      (q: QuerySpec) => options.onChange(q),
      options.debounceMs ?? DEBOUNCE_MS,
    );
    this.build(continuous.map((t) => t.name));
  }

  private build(traitNames: string[]): void {
    this.container.innerHTML = "";
    const form = document.createElement("div");
    form.className = "query-controls";

    const traitSelect = this.select(
      form,
      "trait",
      traitNames,
      this.query.trait,
      (value) => {
        this.query = { ...this.query, trait: value };
        this.changed();
      },
    );
    traitSelect.setAttribute("data-control", "trait");

    const presetSelect = this.select(
      form,
      "preset",
      PRESETS.map((p) => p.id),
      this.query.preset ?? "convergence",
      (value) => {
        this.query = presetQuery(value, this.query.trait);
        this.syncMetricControls();
        this.changed();
      },
    );
    presetSelect.setAttribute("data-control", "preset");

    for (const metric of METRICS) {
      const row = document.createElement("div");
      row.className = "metric-row";
      const label = document.createElement("label");
      label.textContent = metric;
      row.appendChild(label);
      const target = document.createElement("select");
      target.setAttribute("data-target", metric);
      for (const t of ["high", "low", "ignore"] as Target[]) {
        const opt = document.createElement("option");
        opt.value = t;
        opt.textContent = t;
        target.appendChild(opt);
      }
      target.value = this.query.targets[metric];
      target.addEventListener("change", () => {
        this.query = {
          ...this.query,
          preset: null,
          targets: { ...this.query.targets, [metric]: target.value as Target },
        };
        this.changed();
      });
      row.appendChild(target);
      const weight = document.createElement("input");
      weight.type = "range";
      weight.min = "0";
      weight.max = "2";
      weight.step = "0.1";
      weight.value = String(this.query.weights[metric]);
      weight.setAttribute("data-weight", metric);
      weight.addEventListener("input", () => {
        this.query = {
          ...this.query,
          preset: null,
          weights: { ...this.query.weights, [metric]: Number(weight.value) },
        };
        this.changed();
      });
      row.appendChild(weight);
      form.appendChild(row);
    }

    const alpha = document.createElement("input");
    alpha.type = "range";
    alpha.min = "0";
    alpha.max = "1";
    alpha.step = "0.05";
    alpha.value = String(this.query.alpha);
    alpha.setAttribute("data-control", "alpha");
    alpha.addEventListener("input", () => {
      this.query = { ...this.query, alpha: Number(alpha.value) };
      this.changed();
    });
    const alphaLabel = document.createElement("label");
    alphaLabel.textContent = "alpha (time vs topology)";
    form.appendChild(alphaLabel);
    form.appendChild(alpha);

    this.errorBox = document.createElement("div");
    this.errorBox.className = "api-error";
    form.appendChild(this.errorBox);
    this.container.appendChild(form);
  }

  private select(
    form: HTMLElement,
    label: string,
    values: string[],
    current: string,
    onChange: (value: string) => void,
  ): HTMLSelectElement {
    const wrap = document.createElement("label");
    wrap.textContent = label + " ";
    const el = document.createElement("select");
    for (const v of values) {
      const opt = document.createElement("option");
      opt.value = v;
      opt.textContent = v;
      el.appendChild(opt);
    }
    el.value = current;
    el.addEventListener("change", () => onChange(el.value));
    wrap.appendChild(el);
    form.appendChild(wrap);
    return el;
  }

  private syncMetricControls(): void {
    for (const metric of METRICS) {
      const target = this.container.querySelector<HTMLSelectElement>(
        `select[data-target="${metric}"]`,
      );
      if (target) target.value = this.query.targets[metric];
      const weight = this.container.querySelector<HTMLInputElement>(
        `input[data-weight="${metric}"]`,
      );
      if (weight) weight.value = String(this.query.weights[metric]);
    }
  }

  private changed(): void {
    this.clearError();
    this.emit(this.query);
  }

  showError(code: string, message: string): void {
    this.errorBox.textContent = `${code}: ${message}`;
  }

  clearError(): void {
    this.errorBox.textContent = "";
  }
}

export type { MetricName };
