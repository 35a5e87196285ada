// View state and the chat controller.
//
// The view is a pure projection of the service's state snapshot: chips,
// QUD panel, sub-dialogue label and result count are all derived from the
// snapshot, never tracked independently, so the panels can never drift
// from the engine.

import { ApiClient, HttpError, StateSnapshot, TurnPayload } from "./client.js";

export interface Chip {
  kind: string;
  label: string;
}

export interface Message {
  speaker: "user" | "system";
  text: string;
}

export interface ViewState {
  messages: Message[];
  chips: Chip[];
  qud: string[];
  subdialogue: string | null;
  resultCount: number | null;
  closed: boolean;
  busy: boolean;
  retryBanner: boolean;
  needNewSession: boolean;
}

const CHIP_PATTERN = /(motcle|qualificatif|metaterme|type_ressource)\(([^)]*)\)/g;

export function parseQueryChips(canonical: string): Chip[] {
  const chips: Chip[] = [];
  for (const match of canonical.matchAll(CHIP_PATTERN)) {
    chips.push({ kind: match[1], label: match[2] });
  }
  return chips;
}

export function projectSnapshot(snapshot: StateSnapshot): Pick<
  ViewState,
  "chips" | "qud" | "subdialogue" | "resultCount" | "closed"
> {
  return {
    chips: parseQueryChips(snapshot.query),
    qud: [...snapshot.qud],
    subdialogue: snapshot.subdialogue,
    resultCount: snapshot.result_count,
    closed: snapshot.closed,
  };
}

export function removalUtterance(chip: Chip): string {
  return `enlever ${chip.label}`;
}

type Listener = (view: ViewState) => void;

export class ChatController {
  readonly view: ViewState = {
    messages: [],
    chips: [],
    qud: [],
    subdialogue: null,
    resultCount: null,
    closed: false,
    busy: false,
    retryBanner: false,
    needNewSession: false,
  };
  sessionId: string | null = null;
  pendingInput = "";
  private queue: string[] = [];
  private listeners: Listener[] = [];

  constructor(private client: ApiClient) {}

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener(this.view);
    }
  }

  private applyTurn(payload: TurnPayload): void {
    this.view.messages.push({ speaker: "system", text: payload.text });
    Object.assign(this.view, projectSnapshot(payload.state));
  }

  async start(): Promise<void> {
    const payload = await this.client.createSession();
    this.sessionId = payload.session;
    this.view.messages.length = 0;
    this.applyTurn(payload);
    this.view.needNewSession = false;
    this.notify();
  }

  /** Send one utterance; concurrent sends queue until the turn completes. */
  async send(text: string): Promise<void> {
    if (!text.trim() || !this.sessionId) {
      return;
    }
    if (this.view.busy) {
      this.queue.push(text);
      return;
    }
    this.view.busy = true;
    this.view.retryBanner = false;
    this.view.messages.push({ speaker: "user", text });
    this.notify();
    try {
      const payload = await this.client.sendUtterance(this.sessionId, text);
      this.applyTurn(payload);
    } catch (error) {
      // drop the optimistic user bubble, keep the input for retry
      this.view.messages.pop();
      this.pendingInput = text;
      if (error instanceof HttpError && error.status === 404) {
        this.view.needNewSession = true;
      } else {
        this.view.retryBanner = true;
      }
    } finally {
      this.view.busy = false;
      this.notify();
    }
    const queued = this.queue.shift();
    if (queued !== undefined) {
      await this.send(queued);
    }
  }

  /** Chip removal goes through the dialogue as a visible user utterance. */
  async removeChip(chip: Chip): Promise<void> {
    await this.send(removalUtterance(chip));
  }

  async refreshState(): Promise<void> {
    if (!this.sessionId) {
      return;
    }
    const snapshot = await this.client.getState(this.sessionId);
    Object.assign(this.view, projectSnapshot(snapshot));
    this.notify();
  }
}
