/** Goal selection, question formulation, and the question dashboard. */

import type { AppContext } from "../app.js";
import { renderChartSpec } from "../charts.js";
import { badge, clear, el } from "../dom.js";
import type { GoalDoc, QuestionDoc } from "../types.js";

const KIND_COLORS: Record<string, string> = {
  basic: "blue",
  composite: "yellow",
  multilevel: "red",
};


export class GoalStep {
  readonly root: HTMLElement;
  private listBox: HTMLElement;

  constructor(private ctx: AppContext) {
    this.listBox = el("div", { class: "goal-list", "data-test": "goal-list" });
    const nameInput = el("input", { type: "text", placeholder: "new goal name", "data-test": "goal-name" });
    const descInput = el("input", { type: "text", placeholder: "description", "data-test": "goal-description" });
    const requestButton = el("button", { type: "button", "data-test": "goal-request" }, ["Request new goal"]);
    requestButton.addEventListener("click", () => {
      void this.ctx.client
        .requestGoal(nameInput.value.trim(), descInput.value.trim())
        .then(() => {
          this.ctx.setStatus(`requested goal '${nameInput.value.trim()}' for review`);
          nameInput.value = "";
          return this.refresh();
        })
        .catch((error) => this.ctx.setStatus(String(error), true));
    });
    this.root = el("section", { class: "panel goal-step" }, [
      el("h2", {}, ["1. Analytics goal"]),
      this.listBox,
      el("div", { class: "request-form" }, [nameInput, descInput, requestButton]),
    ]);
  }

  async refresh(): Promise<void> {
    const { goals } = await this.ctx.client.goals();
    clear(this.listBox);
    for (const goal of goals) {
      this.listBox.append(this.goalCard(goal));
    }
  }

  private goalCard(goal: GoalDoc): HTMLElement {
    const pending = goal.status === "requested";
    const input = el("input", { type: "radio", name: "goal", "data-test": `goal-${goal.name}` });
    input.checked = this.ctx.session.goalId === goal.goal_id;
    input.disabled = pending;
    input.addEventListener("change", () => {
      this.ctx.session.goalId = goal.goal_id;
      this.ctx.onGoalSelected();
    });
    const card = el("label", { class: pending ? "goal pending" : "goal" }, [
      input,
      el("strong", {}, [goal.name]),
      pending ? badge("pending review", "pending") : el("span", {}, []),
      el("p", {}, [goal.description]),
    ]);
    return card;
  }
}


export class QuestionStep {
  readonly root: HTMLElement;
  private listBox: HTMLElement;
  private textInput: HTMLInputElement;

  constructor(private ctx: AppContext) {
    this.listBox = el("div", { class: "question-list", "data-test": "question-list" });
    this.textInput = el("input", {
      type: "text",
      placeholder: "formulate your analytics question",
      "data-test": "question-text",
    });
    const createButton = el("button", { type: "button", "data-test": "question-create" }, ["Create question"]);
    createButton.addEventListener("click", () => void this.create());
    this.root = el("section", { class: "panel question-step" }, [
      el("h2", {}, ["2. Question"]),
      this.listBox,
      el("div", {}, [this.textInput, createButton]),
    ]);
  }

  private async create(): Promise<void> {
    const goalId = this.ctx.session.goalId;
    if (!goalId || !this.textInput.value.trim()) {
      this.ctx.setStatus("select a goal and enter question text first", true);
      return;
    }
    try {
      const question = await this.ctx.client.createQuestion(goalId, this.textInput.value.trim());
      this.ctx.session.questionId = question.question_id;
      this.ctx.setStatus(`working on question '${question.text}'`);
      await this.refresh();
      await this.ctx.onCatalogChanged();
    } catch (error) {
      this.ctx.setStatus(String(error), true);
    }
  }

  async refresh(): Promise<void> {
    const { questions } = await this.ctx.client.questions();
    clear(this.listBox);
    const mine = questions.filter(
      (q) => !this.ctx.session.goalId || q.goal_id === this.ctx.session.goalId,
    );
    for (const question of mine) {
      const input = el("input", {
        type: "radio", name: "question", "data-test": `question-${question.question_id}`,
      });
      input.checked = this.ctx.session.questionId === question.question_id;
      input.addEventListener("change", () => {
        this.ctx.session.questionId = question.question_id;
        void this.ctx.onCatalogChanged();
      });
      this.listBox.append(el("label", { class: "question" }, [
        input, `${question.text} (${question.indicator_ids.length} indicators)`,
      ]));
    }
  }
}


export class Dashboard {
  readonly root: HTMLElement;
  private body: HTMLElement;

  constructor(private ctx: AppContext) {
    this.body = el("div", { class: "dashboard-body", "data-test": "dashboard" });
    this.root = el("section", { class: "panel dashboard" }, [
      el("h2", {}, ["4. Question dashboard"]),
      this.body,
    ]);
  }

  async refresh(): Promise<void> {
    clear(this.body);
    const questionId = this.ctx.session.questionId;
    if (!questionId) {
      this.body.append(el("p", { class: "hint" }, ["create or pick a question to see its dashboard"]));
      return;
    }
    let question: QuestionDoc;
    try {
      question = await this.ctx.client
        .questions()
        .then(({ questions }) => questions.find((q) => q.question_id === questionId)!);
    } catch (error) {
      this.ctx.setStatus(String(error), true);
      return;
    }
    if (!question) return;

    const questionIrc = el("button", { type: "button", "data-test": "question-irc" }, [
      "Copy question IRC",
    ]);
    questionIrc.addEventListener("click", () => void this.copyIrc(null, questionId));
    this.body.append(el("div", { class: "dashboard-header" }, [
      el("strong", {}, [question.text]),
      questionIrc,
    ]));

    const grid = el("div", { class: "dashboard-grid" });
    this.body.append(grid);
    for (const indicatorId of question.indicator_ids) {
      grid.append(await this.card(questionId, indicatorId));
    }
  }

  private async card(questionId: string, indicatorId: string): Promise<HTMLElement> {
    const record = await this.ctx.client.indicator(indicatorId);
    const name = (record.spec as { name?: string }).name ?? indicatorId;
    const color = KIND_COLORS[record.kind] ?? "blue";
    const ircButton = el("button", { type: "button", "data-test": `irc-${indicatorId}` }, ["Copy IRC"]);
    ircButton.addEventListener("click", () => void this.copyIrc(indicatorId, null));
    const removeButton = el("button", { type: "button", class: "remove" }, ["remove"]);
    removeButton.addEventListener("click", () => {
      void this.ctx.client
        .disassociateIndicator(questionId, indicatorId)
        .then(() => this.ctx.onCatalogChanged())
        .catch((error) => this.ctx.setStatus(String(error), true));
    });
    const chartHolder = el("div", { class: "chart-holder" });
    try {
      const spec = await this.ctx.client.render(indicatorId);
      chartHolder.append(renderChartSpec(spec));
    } catch (error) {
      chartHolder.append(el("p", { class: "warning" }, [`render failed: ${String(error)}`]));
    }
    return el("div", { class: `card kind-${color}`, "data-test": `card-${indicatorId}` }, [
      el("div", { class: "card-head" }, [
        badge(record.kind, color),
        el("strong", {}, [name]),
        ircButton,
        removeButton,
      ]),
      chartHolder,
    ]);
  }

  private async copyIrc(indicatorId: string | null, questionId: string | null): Promise<void> {
    try {
      const snippet = indicatorId
        ? await this.ctx.client.ircSnippet(indicatorId)
        : await this.ctx.client.ircQuestionSnippet(questionId!);
      if (navigator.clipboard?.writeText) {
        await navigator.clipboard.writeText(snippet);
        this.ctx.setStatus("IRC snippet copied to clipboard");
      } else {
        this.ctx.setStatus(`IRC snippet: ${snippet}`);
      }
    } catch (error) {
      this.ctx.setStatus(String(error), true);
    }
  }
}
