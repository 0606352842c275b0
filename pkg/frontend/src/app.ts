// Conversation view: transcript, abbreviation entry, option picker.
//
// The transcript is never mutated locally; every turn shown comes from a
// server response. Options render in server order, are never re-sorted,
// and the whole loop is operable from the keyboard alone.

import { ApiError, ExpandOption, SessionApi, Transcript } from "./api.js";

interface PendingAction {
  run: () => Promise<void>;
}

function el<T extends HTMLElement>(root: ParentNode, selector: string): T {
  const found = root.querySelector(selector);
  if (!found) {
    throw new Error(`missing element ${selector}`);
  }
  return found as T;
}

export class ConversationApp {
  sessionId: string | null = null;

  private transcriptList: HTMLOListElement;
  private partnerInput: HTMLInputElement;
  private partnerAdd: HTMLButtonElement;
  private abbrevInput: HTMLInputElement;
  private abbrevSubmit: HTMLButtonElement;
  private optionsList: HTMLOListElement;
  private freetextInput: HTMLInputElement;
  private freetextAdd: HTMLButtonElement;
  private banner: HTMLElement;
  private bannerMessage: HTMLElement;
  private bannerRetry: HTMLButtonElement;
  private latency: HTMLElement;
  private noiseToggle: HTMLInputElement;
  private sessionDialog: HTMLElement;
  private sessionRestart: HTMLButtonElement;

  private inflight: AbortController | null = null;
  private lastFailed: PendingAction | null = null;

  constructor(
    private api: SessionApi,
    root: ParentNode,
  ) {
    this.transcriptList = el(root, "#transcript");
    this.partnerInput = el(root, "#partner-input");
    this.partnerAdd = el(root, "#partner-add");
    this.abbrevInput = el(root, "#abbrev-input");
    this.abbrevSubmit = el(root, "#abbrev-submit");
    this.optionsList = el(root, "#options");
    this.freetextInput = el(root, "#freetext-input");
    this.freetextAdd = el(root, "#freetext-add");
    this.banner = el(root, "#banner");
    this.bannerMessage = el(root, "#banner-message");
    this.bannerRetry = el(root, "#banner-retry");
    this.latency = el(root, "#latency");
    this.noiseToggle = el(root, "#noise-toggle");
    this.sessionDialog = el(root, "#session-dialog");
    this.sessionRestart = el(root, "#session-restart");
    this.wire();
  }

  async start(): Promise<void> {
    this.sessionId = await this.api.createSession();
    this.syncSubmitState();
    this.abbrevInput.focus();
  }

  private wire(): void {
    this.partnerAdd.addEventListener("click", () => {
      void this.guarded(() => this.addPartnerTurn());
    });
    this.partnerInput.addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") {
        ev.preventDefault();
        void this.guarded(() => this.addPartnerTurn());
      }
    });
    this.abbrevSubmit.addEventListener("click", () => {
      void this.guarded(() => this.submitAbbreviation());
    });
    this.abbrevInput.addEventListener("input", () => this.syncSubmitState());
    this.abbrevInput.addEventListener("keydown", (ev) => {
      if (ev.key === "Enter" && !this.abbrevSubmit.disabled) {
        ev.preventDefault();
        void this.guarded(() => this.submitAbbreviation());
      } else if (ev.key === "ArrowDown") {
        ev.preventDefault();
        this.focusOption(0);
      }
    });
    this.freetextAdd.addEventListener("click", () => {
      void this.guarded(() => this.chooseFreeText());
    });
    this.freetextInput.addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") {
        ev.preventDefault();
        void this.guarded(() => this.chooseFreeText());
      }
    });
    this.bannerRetry.addEventListener("click", () => {
      const action = this.lastFailed;
      this.hideBanner();
      if (action) {
        void this.guarded(action.run);
      }
    });
    this.sessionRestart.addEventListener("click", () => {
      void this.restartSession();
    });
  }

  private syncSubmitState(): void {
    this.abbrevSubmit.disabled = this.abbrevInput.value.trim() === "";
  }

  private requireSession(): string {
    if (!this.sessionId) {
      throw new Error("no active session");
    }
    return this.sessionId;
  }

  private async guarded(run: () => Promise<void>): Promise<void> {
    try {
      await run();
      this.hideBanner();
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") {
        return; // superseded by a newer submission
      }
      if (err instanceof ApiError && err.code === "unknown_session") {
        this.sessionDialog.hidden = false;
        return;
      }
      this.lastFailed = { run };
      this.showBanner(err instanceof Error ? err.message : String(err));
    }
  }

  private async addPartnerTurn(): Promise<void> {
    const text = this.partnerInput.value.trim();
    if (!text) {
      return;
    }
    const transcript = await this.api.addPartnerTurn(this.requireSession(), text);
    this.partnerInput.value = "";
    this.renderTranscript(transcript);
    this.abbrevInput.focus();
  }

  private async submitAbbreviation(): Promise<void> {
    const chars = this.abbrevInput.value.trim();
    if (!chars) {
      return;
    }
    // one expansion in flight per view: a newer submission cancels it
    this.inflight?.abort();
    this.inflight = new AbortController();
    const response = await this.api.expand(
      this.requireSession(),
      chars,
      this.noiseToggle.checked,
      this.inflight.signal,
    );
    this.inflight = null;
    this.latency.textContent = `${response.latency_ms.toFixed(1)} ms`;
    this.renderOptions(response.options);
  }

  private async chooseOption(phrase: string): Promise<void> {
    const transcript = await this.api.select(this.requireSession(), phrase);
    this.renderTranscript(transcript);
    this.clearPendingEntry();
  }

  private async chooseFreeText(): Promise<void> {
    const phrase = this.freetextInput.value.trim();
    if (!phrase) {
      return;
    }
    const transcript = await this.api.select(this.requireSession(), phrase);
    this.freetextInput.value = "";
    this.renderTranscript(transcript);
    this.clearPendingEntry();
  }

  private clearPendingEntry(): void {
    this.abbrevInput.value = "";
    this.optionsList.textContent = "";
    this.syncSubmitState();
    this.abbrevInput.focus();
  }

  private renderTranscript(transcript: Transcript): void {
    this.transcriptList.textContent = "";
    for (const turn of transcript.turns) {
      const item = document.createElement("li");
      item.className = `turn turn-${turn.author}`;
      const badge = document.createElement("span");
      badge.className = "badge";
      badge.textContent = turn.author === "user" ? "you" : "partner";
      const text = document.createElement("span");
      text.className = "turn-text";
      text.textContent = turn.manual ? `${turn.text} *` : turn.text;
      item.append(badge, text);
      this.transcriptList.appendChild(item);
    }
  }

  private renderOptions(options: ExpandOption[]): void {
    this.optionsList.textContent = "";
    options.forEach((option, index) => {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.type = "button";
      button.className = "option";
      button.dataset.index = String(index);
      button.textContent = `${option.phrase} (${option.count})`;
      button.addEventListener("click", () => {
        void this.guarded(() => this.chooseOption(option.phrase));
      });
      button.addEventListener("keydown", (ev) => {
        if (ev.key === "ArrowDown") {
          ev.preventDefault();
          this.focusOption(index + 1);
        } else if (ev.key === "ArrowUp") {
          ev.preventDefault();
          if (index === 0) {
            this.abbrevInput.focus();
          } else {
            this.focusOption(index - 1);
          }
        } else if (ev.key === "Escape") {
          this.abbrevInput.focus();
        }
      });
      item.appendChild(button);
      this.optionsList.appendChild(item);
    });
  }

  private focusOption(index: number): void {
    const buttons = this.optionsList.querySelectorAll<HTMLButtonElement>("button.option");
    if (buttons.length === 0) {
      return;
    }
    const clamped = Math.min(Math.max(index, 0), buttons.length - 1);
    buttons[clamped].focus();
  }

  private showBanner(message: string): void {
    this.bannerMessage.textContent = message;
    this.banner.hidden = false;
  }

  private hideBanner(): void {
    this.banner.hidden = true;
    this.lastFailed = null;
  }

  private async restartSession(): Promise<void> {
    this.sessionDialog.hidden = true;
    this.transcriptList.textContent = "";
    this.optionsList.textContent = "";
    this.sessionId = await this.api.createSession();
    this.abbrevInput.focus();
  }
}
