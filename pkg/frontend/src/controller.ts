// The session loop: fetch the step, render it, post the learner's input,
// render the graded result, repeat until completion. All decisions come
// from the service; a stale client (409 WRONG_STATE) just refetches.

import { ServiceError, TutorClient } from "./api.js";
import type { StepEnvelope, SubmitResult } from "./types.js";
import {
  renderCompletion,
  renderError,
  renderPresentation,
  renderProgress,
  renderQuestionnaire,
  renderResult,
  renderTest,
} from "./views.js";

export class SessionController {
  private sessionId: string | null = null;

  constructor(
    private readonly client: TutorClient,
    private readonly learnerId: string,
    private readonly root: HTMLElement,
  ) {}

  private show(view: HTMLElement): void {
    this.root.replaceChildren(view);
  }

  async start(): Promise<void> {
    await this.guard(async () => {
      const session = await this.client.openSession();
      this.sessionId = session.session_id;
      await this.refresh();
    });
  }

  /** Fetch the current step and render the matching view. */
  async refresh(): Promise<void> {
    await this.guard(async () => {
      const envelope = await this.client.step(this.sessionId!);
      this.render(envelope);
    });
  }

  private render(envelope: StepEnvelope): void {
    const step = envelope.step;
    switch (step.type) {
      case "questionnaire":
        this.show(
          renderQuestionnaire(step, (responses) =>
            this.submit(() => this.client.submitResponses(this.sessionId!, responses)),
          ),
        );
        break;
      case "test":
        this.show(
          renderTest(step, (answers) =>
            this.submit(() => this.client.submitAnswers(this.sessionId!, answers)),
          ),
        );
        break;
      case "presentation":
        this.show(renderPresentation(step, () => this.refresh()));
        break;
      case "completed":
        this.show(renderCompletion(step));
        break;
    }
  }

  private async submit(call: () => Promise<{ result: SubmitResult }>): Promise<void> {
    await this.guard(async () => {
      const envelope = await call();
      this.show(renderResult(envelope.result, () => this.refresh()));
    });
  }

  async showProgress(): Promise<void> {
    await this.guard(async () => {
      const model = await this.client.model(this.learnerId);
      this.show(renderProgress(model));
    });
  }

  /** Shared error policy: stale state refetches, anything else offers retry. */
  private async guard(action: () => Promise<void>): Promise<void> {
    try {
      await action();
    } catch (error) {
      if (error instanceof ServiceError && error.code === "WRONG_STATE") {
        await this.refresh();
        return;
      }
      const message =
        error instanceof ServiceError
          ? `${error.code}: ${error.message}`
          : "Network problem — the tutor could not be reached.";
      this.show(renderError(message, () => this.refresh()));
    }
  }
}
