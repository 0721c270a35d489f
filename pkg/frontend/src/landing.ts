/** Landing view: optional file upload plus data-source selection.
 *
 * Submit creates the session on demand, uploads the chosen files (each
 * success or failure surfaces an alert; a rejected upload keeps the user on
 * the landing page), then triggers analyze. Selecting neither source is
 * caught by inline validation without issuing a request. */

import { AnalyzeSummary, ApiClient } from "./api";
import { ViewState } from "./state";

export interface LandingDeps {
  api: ApiClient;
  state: ViewState;
  onAlert: (message: string) => void;
  onLoading: () => void;
  onAnalyzed: (summary: AnalyzeSummary) => void;
  onFailed: () => void;
}

export class LandingView {
  readonly root: HTMLElement;
  private readonly deps: LandingDeps;
  fileInput!: HTMLInputElement;
  uploadsToggle!: HTMLInputElement;
  backendToggle!: HTMLInputElement;
  submitButton!: HTMLButtonElement;

  constructor(root: HTMLElement, deps: LandingDeps) {
    this.root = root;
    this.deps = deps;
    this.build();
  }

  private build(): void {
    this.root.classList.add("landing-view");

    const intro = document.createElement("p");
    intro.className = "intro";
    intro.textContent =
      "Optionally upload your own documents, choose the data sources, and start the analysis.";

    this.fileInput = document.createElement("input");
    this.fileInput.type = "file";
    this.fileInput.multiple = true;
    this.fileInput.accept = ".txt,.jsonl";
    this.fileInput.className = "file-input";
    this.fileInput.setAttribute("aria-label", "upload documents");

    this.uploadsToggle = this.toggle("use-uploads", "Analyze my uploads", false);
    this.backendToggle = this.toggle("use-backend", "Include the backend corpus", true);

    this.fileInput.addEventListener("change", () => {
      if ((this.fileInput.files?.length ?? 0) > 0) {
        this.uploadsToggle.checked = true;
      }
    });

    this.submitButton = document.createElement("button");
    this.submitButton.className = "submit-button";
    this.submitButton.textContent = "Analyze";
    this.submitButton.addEventListener("click", () => void this.submit());

    this.root.append(
      intro,
      this.fileInput,
      this.uploadsToggle.closest("label")!,
      this.backendToggle.closest("label")!,
      this.submitButton,
    );
  }

  private toggle(id: string, text: string, checked: boolean): HTMLInputElement {
    const label = document.createElement("label");
    label.className = "source-toggle";
    const input = document.createElement("input");
    input.type = "checkbox";
    input.id = id;
    input.checked = checked;
    const span = document.createElement("span");
    span.textContent = text;
    label.append(input, span);
    return input;
  }

  async submit(): Promise<void> {
    const { api, state, onAlert, onLoading, onAnalyzed, onFailed } = this.deps;
    const useUploads = this.uploadsToggle.checked;
    const useBackend = this.backendToggle.checked;
    if (!useUploads && !useBackend) {
      onAlert("select at least one data source");
      return;
    }

    onLoading();
    try {
      if (!state.sessionId) {
        state.sessionId = await api.createSession();
      }
      if (useUploads) {
        const files = Array.from(this.fileInput.files ?? []);
        for (const file of files) {
          const receipt = await api.upload(state.sessionId, file);
          onAlert(`uploaded ${receipt.filename}`);
        }
      }
      const summary = await api.analyze(state.sessionId, { useUploads, useBackend });
      if (summary.message) {
        onAlert(summary.message);
      }
      onAnalyzed(summary);
    } catch (error) {
      onAlert(error instanceof Error ? error.message : String(error));
      onFailed(); // stay on (return to) the landing page
    }
  }
}
