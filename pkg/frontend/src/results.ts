/** Results view: distribution chart, passage table, search and reset.
 *
 * The view performs no classification or filtering itself: the table always
 * shows exactly the passages of the most recent API response. At most one
 * results request is in flight; a newer request aborts and supersedes older
 * ones so the display matches the latest user action. */

import { ApiClient, ResultsPayload } from "./api";
import { ChartMode, renderChart } from "./chart";
import { classLabel } from "./classNames";
import { renderHighlighted } from "./highlight";
import { ViewState } from "./state";

export interface ResultsDeps {
  api: ApiClient;
  state: ViewState;
  pageSize?: number;
  onAlert: (message: string) => void;
}

export class ResultsView {
  readonly root: HTMLElement;
  private readonly deps: ResultsDeps;
  private chartMode: ChartMode = "pie";
  private lastPayload: ResultsPayload | null = null;
  private inflight: AbortController | null = null;
  private requestSeq = 0;

  private chartBox!: HTMLElement;
  private tableBox!: HTMLElement;
  private messageBox!: HTMLElement;
  private searchInput!: HTMLInputElement;

  constructor(root: HTMLElement, deps: ResultsDeps) {
    this.root = root;
    this.deps = deps;
    this.build();
  }

  private build(): void {
    this.root.classList.add("results-view");

    const controls = document.createElement("div");
    controls.className = "controls";

    this.searchInput = document.createElement("input");
    this.searchInput.type = "search";
    this.searchInput.className = "search-input";
    this.searchInput.placeholder = "search within results";
    this.searchInput.setAttribute("aria-label", "keyword search");
    this.searchInput.addEventListener("keydown", (event) => {
      if (event.key === "Enter") {
        event.preventDefault();
        void this.submitSearch();
      }
    });

    const searchButton = document.createElement("button");
    searchButton.className = "search-button";
    searchButton.textContent = "Search";
    searchButton.addEventListener("click", () => void this.submitSearch());

    const resetButton = document.createElement("button");
    resetButton.className = "reset-button";
    resetButton.textContent = "Reset";
    resetButton.addEventListener("click", () => void this.reset());

    const toggleButton = document.createElement("button");
    toggleButton.className = "chart-toggle";
    toggleButton.textContent = "Bar chart";
    toggleButton.addEventListener("click", () => {
      this.chartMode = this.chartMode === "pie" ? "bar" : "pie";
      toggleButton.textContent = this.chartMode === "pie" ? "Bar chart" : "Pie chart";
      this.renderChartBox();
    });

    controls.append(this.searchInput, searchButton, resetButton, toggleButton);

    this.chartBox = document.createElement("div");
    this.chartBox.className = "chart-box";
    this.messageBox = document.createElement("div");
    this.messageBox.className = "message-box";
    this.tableBox = document.createElement("div");
    this.tableBox.className = "table-box";

    this.root.append(controls, this.chartBox, this.messageBox, this.tableBox);
  }

  /** Fetches with the current state; stale or aborted responses are dropped. */
  async refresh(): Promise<void> {
    const { api, state, pageSize, onAlert } = this.deps;
    if (!state.sessionId) return;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const seq = ++this.requestSeq;
    try {
      const payload = await api.results(
        state.sessionId,
        {
          classId: state.selectedClass,
          query: state.query || undefined,
          page: state.page,
          pageSize,
        },
        controller.signal,
      );
      if (seq !== this.requestSeq) return; // superseded by a newer request
      this.lastPayload = payload;
      this.render();
    } catch (error) {
      if (controller.signal.aborted) return;
      if (seq !== this.requestSeq) return;
      // keep the previous results on failure, surface the message
      onAlert(error instanceof Error ? error.message : String(error));
    }
  }

  show(payload: ResultsPayload | null): void {
    if (payload) {
      this.lastPayload = payload;
      this.render();
    } else {
      void this.refresh();
    }
  }

  private async submitSearch(): Promise<void> {
    this.deps.state.query = this.searchInput.value.trim();
    this.deps.state.page = 1;
    await this.refresh();
  }

  private async reset(): Promise<void> {
    this.deps.state.query = "";
    this.deps.state.selectedClass = null;
    this.deps.state.page = 1;
    this.searchInput.value = "";
    await this.refresh();
  }

  private onSegmentSelect = (classId: number): void => {
    const { state } = this.deps;
    // clicking the selected segment again clears the class filter
    state.selectedClass = state.selectedClass === classId ? null : classId;
    state.page = 1;
    void this.refresh();
  };

  private render(): void {
    this.renderChartBox();
    this.renderMessage();
    this.renderTable();
  }

  private renderChartBox(): void {
    if (!this.lastPayload) return;
    renderChart(this.chartBox, this.lastPayload.distribution, {
      selected: this.deps.state.selectedClass,
      mode: this.chartMode,
      onSelect: this.onSegmentSelect,
    });
  }

  private renderMessage(): void {
    const payload = this.lastPayload;
    this.messageBox.replaceChildren();
    if (!payload) return;
    if (payload.total === 0) {
      const panel = document.createElement("p");
      panel.className = "no-results";
      panel.textContent = payload.message ?? "no results found";
      this.messageBox.append(panel);
    } else if (payload.message) {
      const note = document.createElement("p");
      note.className = "advisory";
      note.textContent = payload.message;
      this.messageBox.append(note);
    }
  }

  private renderTable(): void {
    const payload = this.lastPayload;
    this.tableBox.replaceChildren();
    if (!payload || payload.passages.length === 0) return;

    const table = document.createElement("table");
    table.className = "passage-table";
    const head = document.createElement("tr");
    for (const column of ["Text", "Classes", "Source", "Origin"]) {
      const th = document.createElement("th");
      th.textContent = column;
      head.append(th);
    }
    table.append(head);

    for (const passage of payload.passages) {
      const row = document.createElement("tr");
      row.className = "passage-row";
      row.setAttribute("data-passage-id", passage.passage_id);

      const textCell = document.createElement("td");
      textCell.className = "passage-text";
      textCell.append(renderHighlighted(passage.text, passage.match_spans));

      const classCell = document.createElement("td");
      classCell.className = "passage-classes";
      classCell.textContent = passage.class_ids.map(classLabel).join(", ");

      const sourceCell = document.createElement("td");
      const link = document.createElement("a");
      link.className = "source-link";
      link.href = passage.source_link;
      link.target = "_blank";
      link.rel = "noreferrer";
      link.textContent = passage.source_link;
      sourceCell.append(link);

      const originCell = document.createElement("td");
      originCell.className = "passage-origin";
      originCell.textContent = passage.origin;

      row.append(textCell, classCell, sourceCell, originCell);
      table.append(row);
    }
    this.tableBox.append(table);

    const total = document.createElement("p");
    total.className = "result-total";
    total.textContent = `${payload.total} passages`;
    this.tableBox.append(total);
  }
}
