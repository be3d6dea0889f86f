/** Application shell: wires the wizard panels to one editor session and
 * one engine client. Exported separately from the bootstrap so tests can
 * mount the full app against any engine URL. */

import { EngineClient } from "./api.js";
import { clear, el } from "./dom.js";
import { newSession, type EditorSession } from "./state.js";
import type { ChartLibraryDoc, MethodDescriptorDoc } from "./types.js";
import { BasicWizard } from "./ui/basicWizard.js";
import { Dashboard, GoalStep, QuestionStep } from "./ui/catalogViews.js";
import { CompositePanel, MultiLevelPanel } from "./ui/compose.js";

export interface AppContext {
  client: EngineClient;
  session: EditorSession;
  methods: MethodDescriptorDoc[];
  libraries: ChartLibraryDoc[];
  setStatus(message: string, isError?: boolean): void;
  onGoalSelected(): void;
  onCatalogChanged(): Promise<void>;
}

export interface AppHandles {
  ctx: AppContext;
  wizard: BasicWizard;
  composite: CompositePanel;
  multilevel: MultiLevelPanel;
  dashboard: Dashboard;
  goalStep: GoalStep;
  questionStep: QuestionStep;
}

export async function initApp(root: HTMLElement, client: EngineClient): Promise<AppHandles> {
  clear(root);
  const statusBar = el("div", { class: "status", "data-test": "status" });

  const session = newSession();
  const ctx: AppContext = {
    client,
    session,
    methods: [],
    libraries: [],
    setStatus(message, isError = false) {
      statusBar.textContent = message;
      statusBar.className = isError ? "status error" : "status";
    },
    onGoalSelected() {
      void questionStep.refresh();
    },
    async onCatalogChanged() {
      await Promise.all([
        questionStep.refresh(),
        dashboard.refresh(),
        composite.refresh(),
        multilevel.refresh(),
      ]);
    },
  };

  const [methods, libraries] = await Promise.all([client.methods(), client.chartLibraries()]);
  ctx.methods = methods.methods;
  ctx.libraries = libraries.libraries;

  const goalStep = new GoalStep(ctx);
  const questionStep = new QuestionStep(ctx);
  const wizard = new BasicWizard(ctx);
  const composite = new CompositePanel(ctx);
  const multilevel = new MultiLevelPanel(ctx);
  const dashboard = new Dashboard(ctx);

  // beginner/advanced toggle collapses mapping detail (types + examples)
  const modeToggle = el("button", { type: "button", "data-test": "mode-toggle" }, ["Beginner mode"]);
  modeToggle.addEventListener("click", () => {
    session.beginnerMode = !session.beginnerMode;
    modeToggle.textContent = session.beginnerMode ? "Advanced mode" : "Beginner mode";
    root.classList.toggle("beginner", session.beginnerMode);
  });

  const tabs = el("nav", { class: "kind-tabs" });
  const panels: Record<string, HTMLElement> = {
    basic: wizard.root,
    composite: composite.root,
    multilevel: multilevel.root,
  };
  for (const kind of ["basic", "composite", "multilevel"] as const) {
    const button = el("button", { type: "button", "data-test": `tab-${kind}` }, [kind]);
    button.addEventListener("click", () => {
      for (const [name, panel] of Object.entries(panels)) {
        panel.classList.toggle("hidden", name !== kind);
      }
    });
    tabs.append(button);
  }
  composite.root.classList.add("hidden");
  multilevel.root.classList.add("hidden");

  root.append(
    el("header", {}, [el("h1", {}, ["Indicator editor"]), modeToggle, statusBar]),
    goalStep.root,
    questionStep.root,
    el("section", { class: "panel editor" }, [
      el("h2", {}, ["3. Indicators"]),
      tabs,
      wizard.root,
      composite.root,
      multilevel.root,
    ]),
    dashboard.root,
  );

  await goalStep.refresh();
  await questionStep.refresh();
  await wizard.mount();
  await composite.refresh();
  await multilevel.refresh();
  await dashboard.refresh();

  return { ctx, wizard, composite, multilevel, dashboard, goalStep, questionStep };
}
