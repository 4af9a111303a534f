// Trainer/evaluator controller: owns the session, the capture loop, the
// overlay, labeling, and training. All recognition math stays on the service;
// this class only moves JSON between the endpoints and the DOM.

import { FrameResult, ServiceError, TrainReport, VisageClient } from "./api.js";
import { CaptureLoop, FrameSource } from "./capture.js";
import { Overlay } from "./overlay.js";
import { encodePgm } from "./pgm.js";

export const EXPRESSIONS = ["Neutral", "Smile", "Angry", "Excited"];
const SESSION_KEY = "visage.session";

export interface AppElements {
  status: HTMLElement;
  modeBadge: HTMLElement;
  prediction: HTMLElement;
  overlay: SVGSVGElement;
  labelBar: HTMLElement;
  poolCounts: HTMLElement;
  trainButton: HTMLButtonElement;
  resetButton: HTMLButtonElement;
  report: HTMLElement;
  toasts: HTMLElement;
}

export class TrainerApp {
  readonly overlay: Overlay;
  readonly labelButtons = new Map<string, HTMLButtonElement>();
  sessionId: string | null = null;
  mode: "train" | "evaluate" = "train";
  landmarksSeen = false;
  lastResult: FrameResult | null = null;
  loop: CaptureLoop | null = null;
  private backoffMs = 1000;

  constructor(
    readonly client: VisageClient,
    readonly el: AppElements,
    readonly storage: Storage = localStorage,
  ) {
    this.overlay = new Overlay(el.overlay, el.prediction);
    this.buildLabelBar();
    el.trainButton.addEventListener("click", () => void this.train());
    el.resetButton.addEventListener("click", () => void this.resetReference());
    this.setMode("train");
  }

  private buildLabelBar(): void {
    for (const name of EXPRESSIONS) {
      const button = document.createElement("button");
      button.textContent = name;
      button.disabled = true; // enabled once landmarks are initialized
      button.dataset.label = name;
      button.addEventListener("mousedown", () => void this.pressLabel(name));
      button.addEventListener("mouseup", () => void this.releaseLabel());
      button.addEventListener("mouseleave", () => void this.releaseLabel());
      this.el.labelBar.appendChild(button);
      this.labelButtons.set(name, button);
    }
  }

  status(text: string, kind: "ok" | "warn" | "error" = "ok"): void {
    this.el.status.textContent = text;
    this.el.status.dataset.kind = kind;
  }

  toast(text: string): void {
    const node = document.createElement("div");
    node.className = "toast";
    node.textContent = text;
    this.el.toasts.appendChild(node);
    setTimeout(() => node.remove(), 4000);
  }

  setMode(mode: "train" | "evaluate"): void {
    this.mode = mode;
    this.el.modeBadge.textContent = mode;
    this.el.modeBadge.dataset.mode = mode;
  }

  async init(): Promise<void> {
    const stored = this.storage.getItem(SESSION_KEY);
    if (stored) {
      this.sessionId = stored;
      this.status(`session ${stored} restored`);
      return;
    }
    await this.newSession();
  }

  async newSession(): Promise<void> {
    this.sessionId = await this.client.createSession();
    this.storage.setItem(SESSION_KEY, this.sessionId);
    this.landmarksSeen = false;
    this.status(`session ${this.sessionId} created`);
  }

  attachSource(source: FrameSource, fps = 10): CaptureLoop {
    this.loop = new CaptureLoop(
      source,
      async (frame) => {
        await this.sendFrame(encodePgm(frame));
      },
      fps,
    );
    return this.loop;
  }

  async sendFrame(pgmBytes: Uint8Array): Promise<FrameResult | null> {
    if (!this.sessionId) return null;
    try {
      const result = await this.client.postFrame(this.sessionId, pgmBytes);
      this.backoffMs = 1000;
      this.handleResult(result);
      return result;
    } catch (err) {
      if (err instanceof ServiceError && err.status === 404) {
        // stale stored session: start a fresh one
        await this.newSession();
        return null;
      }
      await this.handleUnreachable(err);
      return null;
    }
  }

  private async handleUnreachable(err: unknown): Promise<void> {
    const wait = this.backoffMs;
    this.backoffMs = Math.min(this.backoffMs * 2, 15000);
    this.status(`service unreachable, retrying in ${Math.round(wait / 1000)}s`, "error");
    this.loop?.stop();
    setTimeout(() => this.loop?.start(), wait);
    console.warn("frame post failed:", err);
  }

  handleResult(result: FrameResult): void {
    this.lastResult = result;
    this.overlay.render(result);
    if (result.landmarks && !this.landmarksSeen) {
      this.landmarksSeen = true;
      for (const button of this.labelButtons.values()) button.disabled = false;
    }
    const skin = result.skin_checked
      ? ` skin ${(result.skin_fraction ?? 0).toFixed(2)}`
      : "";
    this.status(`frame ${result.frame}: ${result.source}${skin}`);
    if (!result.predicted) this.el.prediction.classList.remove("visible");
  }

  async pressLabel(label: string): Promise<void> {
    if (!this.sessionId || this.mode !== "train") return;
    try {
      const response = await this.client.setLabel(this.sessionId, label);
      this.renderPoolCounts(response.pool_counts);
    } catch (err) {
      this.toastError(err);
    }
  }

  async releaseLabel(): Promise<void> {
    if (!this.sessionId) return;
    try {
      const response = await this.client.setLabel(this.sessionId, null);
      this.renderPoolCounts(response.pool_counts);
    } catch (err) {
      this.toastError(err);
    }
  }

  renderPoolCounts(counts: Record<string, number>): void {
    this.el.poolCounts.textContent = EXPRESSIONS.map(
      (name) => `${name} ${counts[name] ?? 0}`,
    ).join("  ");
    for (const [name, button] of this.labelButtons) {
      button.dataset.count = String(counts[name] ?? 0);
    }
  }

  async train(): Promise<void> {
    if (!this.sessionId) return;
    this.el.trainButton.disabled = true;
    this.status("training...");
    try {
      const report = await this.client.train(this.sessionId);
      this.renderReport(report);
      this.setMode("evaluate");
      this.status("model trained; live predictions on");
    } catch (err) {
      this.toastError(err);
      this.status("training failed", "warn");
    } finally {
      this.el.trainButton.disabled = false;
    }
  }

  async resetReference(): Promise<void> {
    if (!this.sessionId) return;
    try {
      await this.client.resetReference(this.sessionId);
      this.toast("reference reset; hold a neutral face");
    } catch (err) {
      this.toastError(err);
    }
  }

  private toastError(err: unknown): void {
    if (err instanceof ServiceError) {
      this.toast(`${err.status}: ${err.message}`);
    } else {
      this.toast(String(err));
    }
  }

  renderReport(report: TrainReport): void {
    const lines: string[] = [];
    lines.push(
      `<p>best C ${report.best_c}, gamma ${report.best_gamma}, ` +
      `CV accuracy ${(100 * report.cv_accuracy).toFixed(1)}%</p>`,
    );
    const { labels, counts, per_class, overall } = report.confusion;
    const head = labels.map((l) => `<th>${l}</th>`).join("");
    const rows = labels.map((label, i) => {
      const cells = counts[i].map((v) => `<td>${v}</td>`).join("");
      const rate = per_class[i] === null ? "-" : `${per_class[i]}%`;
      return `<tr data-row="${label}"><th>${label}</th>${cells}<td>${rate}</td></tr>`;
    });
    lines.push(
      `<table class="confusion"><thead><tr><th></th>${head}<th>rate</th></tr></thead>` +
      `<tbody>${rows.join("")}</tbody></table>`,
    );
    lines.push(`<p>held-out overall ${overall}%</p>`);
    this.el.report.innerHTML = lines.join("\n");
  }
}
