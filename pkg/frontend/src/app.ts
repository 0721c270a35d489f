/** Application shell: owns the view state and swaps landing / loading /
 * results views. Exported for component tests; main.ts mounts it on the
 * document body. */

import { AnalyzeSummary, ApiClient } from "./api";
import { LandingView } from "./landing";
import { ResultsView } from "./results";
import { initialState, ViewState } from "./state";

export interface App {
  state: ViewState;
  landing: LandingView;
  results: ResultsView;
  root: HTMLElement;
}

const MAX_ALERTS = 5;

export function mountApp(root: HTMLElement, api: ApiClient): App {
  const state = initialState();
  root.classList.add("claimsift-app");

  const alertBox = document.createElement("div");
  alertBox.className = "alerts";
  alertBox.setAttribute("role", "status");

  const landingRoot = document.createElement("section");
  const loadingRoot = document.createElement("section");
  loadingRoot.className = "loading-view";
  const spinner = document.createElement("div");
  spinner.className = "spinner";
  spinner.setAttribute("aria-label", "processing");
  const loadingText = document.createElement("p");
  loadingText.textContent = "Processing your data...";
  loadingRoot.append(spinner, loadingText);
  const resultsRoot = document.createElement("section");

  root.append(alertBox, landingRoot, loadingRoot, resultsRoot);

  function renderAlerts(): void {
    alertBox.replaceChildren();
    for (const message of state.alerts.slice(-MAX_ALERTS)) {
      const item = document.createElement("p");
      item.className = "alert";
      item.textContent = message;
      alertBox.append(item);
    }
  }

  function setView(view: ViewState["view"]): void {
    state.view = view;
    landingRoot.hidden = view !== "landing";
    loadingRoot.hidden = view !== "loading";
    resultsRoot.hidden = view !== "results";
  }

  const onAlert = (message: string): void => {
    state.alerts.push(message);
    renderAlerts();
  };

  const results = new ResultsView(resultsRoot, { api, state, onAlert });

  const landing = new LandingView(landingRoot, {
    api,
    state,
    onAlert,
    onLoading: () => setView("loading"),
    onFailed: () => setView("landing"),
    onAnalyzed: (_summary: AnalyzeSummary) => {
      state.selectedClass = null;
      state.query = "";
      state.page = 1;
      setView("results");
      results.show(null); // fetch the first page of the cached analysis
    },
  });

  setView("landing");
  return { state, landing, results, root };
}
