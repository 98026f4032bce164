// Session controller.  Owns the latest server state plus operator-side inputs
// (priority list), and guards the one rule the UI must never break: a pick is
// only ever sent for a row the server marked eligible.

import { ApiError, CreatePayload, SessionClient } from "./client.js";
import { FinishDoc, SessionState } from "./types.js";
import { ConsoleView, renderState } from "./view.js";

export interface ConsoleStatus {
  view: ConsoleView | null;
  banner: string | null; // inline message; cleared by the next successful call
  finished: FinishDoc | null;
}

export class Console {
  private state: SessionState | null = null;
  private banner: string | null = null;
  private finishDoc: FinishDoc | null = null;
  private priorityList: number[] = [];

  constructor(private readonly client: SessionClient) {}

  get sessionId(): string | null {
    return this.state?.id ?? null;
  }

  status(): ConsoleStatus {
    return {
      view: this.state ? renderState(this.state, this.priorityList) : null,
      banner: this.banner,
      finished: this.finishDoc,
    };
  }

  setPriorityList(groups: number[]): ConsoleStatus {
    this.priorityList = [...groups];
    return this.status();
  }

  async create(payload: CreatePayload): Promise<ConsoleStatus> {
    return this.call(async () => {
      this.state = await this.client.createSession(payload);
      this.finishDoc = null;
    });
  }

  async refresh(): Promise<ConsoleStatus> {
    const id = this.requireSession();
    return this.call(async () => {
      this.state = await this.client.getState(id);
    });
  }

  async pickRow(group: number): Promise<ConsoleStatus> {
    const id = this.requireSession();
    const row = this.status().view?.candidateTable.find((r) => r.group === group);
    if (!row || !row.pickable) {
      // local refusal: the request is never sent for an ineligible row
      this.banner = `group ${group} is not currently pickable`;
      return this.status();
    }
    return this.call(async () => {
      this.state = await this.client.pick(id, group);
    });
  }

  async autoStep(steps: number): Promise<ConsoleStatus> {
    const id = this.requireSession();
    return this.call(async () => {
      this.state = await this.client.auto(id, steps);
    });
  }

  async finish(): Promise<ConsoleStatus> {
    const id = this.requireSession();
    return this.call(async () => {
      this.finishDoc = await this.client.finish(id);
      this.state = this.finishDoc.state;
    });
  }

  private requireSession(): string {
    const id = this.sessionId;
    if (!id) throw new Error("no active session");
    return id;
  }

  /** Run one server call; on failure show a banner and resync, never desync. */
  private async call(action: () => Promise<void>): Promise<ConsoleStatus> {
    try {
      await action();
      this.banner = null;
    } catch (err) {
      this.banner = err instanceof Error ? err.message : String(err);
      if (err instanceof ApiError && this.state) {
        // the server refused the mutation and kept its state; re-fetch so the
        // console provably shows what the server has
        try {
          this.state = await this.client.getState(this.state.id);
        } catch {
          // keep the last consistent snapshot; the banner already says enough
        }
      }
    }
    return this.status();
  }
}
