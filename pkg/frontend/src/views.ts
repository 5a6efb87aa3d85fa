// Pure DOM builders, one per server-driven view. Nothing in here grades,
// gates, or sequences: the elements show exactly what the service sent.

import type {
  CompletedStep,
  ModelView,
  PresentationStep,
  QuestionnaireStep,
  RuleFiring,
  SubmitResult,
  TestStep,
} from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function heading(title: string, subtitle?: string): HTMLElement {
  const head = el("header", "view-head");
  head.append(el("h2", undefined, title));
  if (subtitle) head.append(el("p", "subtitle", subtitle));
  return head;
}

export function tracePanel(trace: RuleFiring[] | undefined): HTMLElement {
  const details = el("details", "trace");
  details.append(el("summary", undefined, "Why am I seeing this?"));
  const list = el("ul");
  for (const firing of trace ?? []) {
    const item = el("li");
    item.append(el("code", undefined, firing.rule), el("span", undefined, ` ${firing.because}`));
    list.append(item);
  }
  details.append(list);
  return details;
}

/** One-shot submit guard: disables the button until the handler settles. */
function submitButton(label: string, onSubmit: () => Promise<void>): HTMLButtonElement {
  const button = el("button", "primary", label);
  button.type = "button";
  button.addEventListener("click", async () => {
    if (button.disabled) return;
    button.disabled = true;
    try {
      await onSubmit();
    } finally {
      button.disabled = false;
    }
  });
  return button;
}

export function renderQuestionnaire(
  step: QuestionnaireStep,
  onSubmit: (responses: Record<string, number>) => Promise<void>,
): HTMLElement {
  const view = el("section", "view questionnaire-view");
  view.append(
    heading(
      "How do you learn best?",
      "Rate each statement; your answers shape how lessons are taught to you.",
    ),
  );
  const form = el("form");
  for (const item of step.items) {
    const row = el("fieldset", "item");
    row.append(el("legend", undefined, item.prompt));
    for (let value = step.scale.min; value <= step.scale.max; value++) {
      const label = el("label");
      const radio = el("input");
      radio.type = "radio";
      radio.name = item.id;
      radio.value = String(value);
      radio.required = true;
      label.append(radio, el("span", undefined, String(value)));
      row.append(label);
    }
    form.append(row);
  }
  const hint = el("p", "hint", "1 = not me at all, 5 = exactly me");
  const button = submitButton("Save my profile", async () => {
    const responses: Record<string, number> = {};
    for (const item of step.items) {
      const checked = form.querySelector<HTMLInputElement>(`input[name="${item.id}"]:checked`);
      if (!checked) {
        hint.textContent = "Please answer every statement.";
        hint.classList.add("warn");
        return;
      }
      responses[item.id] = Number(checked.value);
    }
    await onSubmit(responses);
  });
  form.append(hint, button);
  view.append(form);
  return view;
}

export function renderTest(
  step: TestStep,
  onSubmit: (answers: Record<string, number>) => Promise<void>,
): HTMLElement {
  const view = el("section", `view test-view ${step.phase}`);
  const what = step.phase === "pretest" ? "Pre-test" : "Post-test";
  view.append(
    heading(
      `${what}: ${step.concept_title}`,
      step.phase === "pretest"
        ? "Show what you already know; a high score skips the lesson."
        : "Show what you learned; passing moves you on.",
    ),
  );
  const form = el("form");
  for (const [index, question] of step.questions.entries()) {
    const block = el("fieldset", "question");
    block.append(el("legend", undefined, `${index + 1}. ${question.body}`));
    for (const [choiceIndex, choice] of question.choices.entries()) {
      const label = el("label", "choice");
      const radio = el("input");
      radio.type = "radio";
      radio.name = question.id;
      radio.value = String(choiceIndex);
      label.append(radio, el("span", undefined, choice));
      block.append(label);
    }
    form.append(block);
  }
  const hint = el("p", "hint", `${step.questions.length} questions`);
  const button = submitButton("Submit answers", async () => {
    const answers: Record<string, number> = {};
    for (const question of step.questions) {
      const checked = form.querySelector<HTMLInputElement>(
        `input[name="${question.id}"]:checked`,
      );
      if (!checked) {
        hint.textContent = "Please answer every question.";
        hint.classList.add("warn");
        return;
      }
      answers[question.id] = Number(checked.value);
    }
    await onSubmit(answers);
  });
  form.append(hint, button);
  view.append(form);
  return view;
}

export function renderPresentation(step: PresentationStep, onContinue: () => Promise<void>): HTMLElement {
  const view = el("section", "view presentation-view");
  view.append(heading(step.concept_title, `Taught via ${step.method.replace("_", " ")}`));
  const stage = el("div", `asset asset-${step.method}`);
  if (step.method === "film") {
    const video = el("video");
    video.controls = true;
    video.src = step.asset;
    stage.append(video);
  } else if (step.method === "text") {
    const panel = el("article", "text-panel");
    panel.append(el("p", undefined, `Read: ${step.asset}`));
    const link = el("a", undefined, "Open the reading material");
    link.href = step.asset;
    link.target = "_blank";
    panel.append(link);
    stage.append(panel);
  } else {
    const frame = el("iframe", "interactive");
    frame.src = step.asset;
    frame.title = `${step.method} activity for ${step.concept_title}`;
    stage.append(frame);
  }
  view.append(stage);
  view.append(submitButton("I'm done — test me", onContinue));
  return view;
}

export function renderResult(result: SubmitResult, onContinue: () => Promise<void>): HTMLElement {
  const view = el("section", "view result-view");
  if (result.dominant_style !== undefined) {
    view.append(heading("Profile saved", `Your dominant learning style: ${result.dominant_style}`));
  } else {
    view.append(heading(`Score: ${result.score}`, `Band: ${result.knowledge_level}`));
    const notice = el("p", `decision decision-${result.decision}`);
    switch (result.decision) {
      case "skip":
        notice.textContent = "Skipped — you already know this one.";
        break;
      case "train":
        notice.textContent = "Let's learn it properly.";
        break;
      case "remediate":
        notice.textContent = "We'll go back and firm up a prerequisite first.";
        break;
      case "mastered":
        notice.textContent = "Mastered! Moving on.";
        break;
      case "retrain":
        notice.textContent = "Not there yet — same lesson, taught a different way, fresh questions.";
        break;
      default:
        notice.textContent = "";
    }
    view.append(notice);
  }
  view.append(tracePanel(result.trace));
  view.append(submitButton("Continue", onContinue));
  return view;
}

const BADGE_LABELS: Record<string, string> = {
  excellent: "Excellent",
  very_good: "Very good",
  good: "Good",
  average: "Average",
  weak: "Weak",
};

export function renderProgress(model: ModelView): HTMLElement {
  const view = el("section", "view progress-view");
  view.append(
    heading(
      `Progress for ${model.name}`,
      `Learner level: ${model.learner_level.replace("_", " ")}` +
        (model.style ? ` · style: ${model.style.dominant}` : ""),
    ),
  );
  for (const topic of model.topics) {
    const section = el("div", "topic");
    section.append(el("h3", undefined, `${topic.title} — ${topic.score}`));
    const list = el("ul", "concepts");
    for (const concept of model.concepts.filter((c) => c.topic_id === topic.id)) {
      const item = el("li", "concept");
      const badgeClass = concept.knowledge_level ?? "none";
      const badgeText =
        concept.knowledge_level === null
          ? "not attempted"
          : `${BADGE_LABELS[concept.knowledge_level]} (${concept.score})`;
      item.append(
        el("span", `badge badge-${badgeClass}`, badgeText),
        el("span", "concept-title", ` ${concept.title}`),
        el("span", "attempts", concept.attempts ? ` · ${concept.attempts} attempt(s)` : ""),
      );
      list.append(item);
    }
    section.append(list);
    view.append(section);
  }
  const faq = el("a", "faq-link", "Frequently asked questions");
  faq.href = "#faq";
  view.append(faq);
  return view;
}

export function renderCompletion(step: CompletedStep): HTMLElement {
  const view = el("section", "view completion-view");
  view.append(
    heading("Curriculum complete!", `Finishing learner level: ${step.learner_level.replace("_", " ")}`),
  );
  const list = el("ul", "topics");
  for (const topic of step.topics) {
    list.append(el("li", undefined, `${topic.title}: ${topic.score}`));
  }
  view.append(list);
  return view;
}

export function renderFaq(items: { q: string; a: string }[]): HTMLElement {
  const view = el("section", "view faq-view");
  view.append(heading("Frequently asked questions"));
  for (const entry of items) {
    const block = el("details", "faq-item");
    block.append(el("summary", undefined, entry.q), el("p", undefined, entry.a));
    view.append(block);
  }
  return view;
}

export function renderError(message: string, onRetry: () => Promise<void>): HTMLElement {
  const view = el("section", "view error-view");
  view.append(heading("Something went wrong", message));
  view.append(submitButton("Try again", onRetry));
  return view;
}
