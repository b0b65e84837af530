/** Application wiring: tree view, trait view, pattern view, URL state. */

import { ApiClient, ApiError } from "./api";
import { QueryControls } from "./controls";
import { PatternView, byTopRankFrequency } from "./patternview";
import { decodeState, defaultState, encodeState, rankRequestBody } from "./state";
import type { ViewState } from "./state";
import { TraitView } from "./traitview";
import { TreeView } from "./treeview";
import type { RankResponse } from "./types";

const TOP = 25;

export async function startApp(root: HTMLElement, api = new ApiClient()) {
  root.innerHTML = `
    <header><h1>trait pattern explorer</h1></header>
    <main class="layout">
      <section id="tree-pane"><h2>tree</h2><div id="tree"></div></section>
      <section id="trait-pane"><h2>traits over time</h2><div id="traits"></div></section>
      <section id="pattern-pane">
        <h2>pattern search</h2>
        <div id="controls"></div>
        <label><input type="checkbox" id="sort-freq"> sort by frequency of top rankings</label>
        <div id="pairs"></div>
      </section>
    </main>`;

  const state: ViewState = window.location.hash
    ? decodeState(window.location.hash)
    : defaultState();
  const dataset = await api.getDataset();
  let selectionCounter = 0;
  let lastRank: RankResponse | null = null;

  const traitView = new TraitView(root.querySelector("#traits")!, {
    onOutlierBrush: (leafIds) => registerSelection(leafIds),
  });
  const patternView = new PatternView(root.querySelector("#pairs")!);
  const treeView = new TreeView(root.querySelector("#tree")!, {
    onBrush: (leafIds) => registerSelection(leafIds),
  });
  treeView.render(dataset);

  const syncHash = () => {
    window.history.replaceState(null, "", encodeState(state));
  };

  async function registerSelection(leafIds: string[]) {
    const name = `brush-${++selectionCounter}-${Date.now()}`;
    try {
      const sel = await api.postSelection({
        name,
        origin: "brush",
        leaf_ids: leafIds,
        color_key: state.colorKey,
      });
      state.selection = sel.name;
      treeView.setHighlight(sel.leaf_ids);
      syncHash();
      await refreshBins();
    } catch (err) {
      reportError(err);
    }
  }

  async function refreshBins() {
    if (state.selection === null) return;
    try {
      const bins = await api.postBins({
        selection: state.selection,
        k: state.k,
        traits: dataset.trait_defs.map((t) => t.name),
      });
      traitView.render(bins);
    } catch (err) {
      reportError(err);
    }
  }

  const controls = new QueryControls(
    root.querySelector("#controls")!,
    dataset.trait_defs,
    {
      onChange: async (query) => {
        state.query = query;
        syncHash();
        try {
          const resp = await api.postRank(rankRequestBody(query, TOP));
          if (resp === null) return; // superseded by a newer request
          lastRank = resp;
          renderRank();
        } catch (err) {
          if (err instanceof ApiError) {
            controls.showError(err.body.code, err.body.message);
          } else {
            reportError(err);
          }
        }
      },
    },
  );
  if (state.query !== null) {
    controls.query = state.query;
  }

  const sortToggle = root.querySelector<HTMLInputElement>("#sort-freq")!;
  sortToggle.checked = state.sortByFrequency;
  sortToggle.addEventListener("change", () => {
    state.sortByFrequency = sortToggle.checked;
    syncHash();
    renderRank();
  });

  function renderRank() {
    if (lastRank === null) return;
    const ordered = state.sortByFrequency
      ? byTopRankFrequency(lastRank.pairs)
      : lastRank.pairs;
    patternView.render(lastRank, ordered);
  }

  function reportError(err: unknown) {
    const box = document.createElement("div");
    box.className = "api-error global";
    box.textContent =
      err instanceof ApiError
        ? `${err.body.code}: ${err.body.message}`
        : String(err);
    root.prepend(box);
    setTimeout(() => box.remove(), 5000);
  }

  // kick off an initial ranking so the pattern pane is never empty
  state.query = controls.query;
  syncHash();
  const initial = await api.postRank(rankRequestBody(controls.query, TOP));
  if (initial !== null) {
    lastRank = initial;
    renderRank();
  }
  return { state, refreshBins, registerSelection };
}

declare global {
  interface Window {
    __trevoStarted?: boolean;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  if (!window.__trevoStarted) {
    window.__trevoStarted = true;
    startApp(document.getElementById("app")!).catch((err) => {
      document.getElementById("app")!.textContent = String(err);
    });
  }
}
