import { ApiError, PlannerApi } from "./api.js";
import { BoardError, PlanBoard } from "./board.js";
import { ExchangeError, ExportBlockedError, canExport, exportTimeline, parseTimeline } from "./exchange.js";
import { FeedbackState, renderFeedbackHtml } from "./feedback.js";
import { CatalogEntry, ProgramRef, TimelineDocument } from "./types.js";
import { DebouncedValidator } from "./validator.js";

const START_OPTIONS = [
  "WS2020", "SS2021", "WS2021", "SS2022", "WS2022", "SS2023",
  "WS2023", "SS2024", "WS2024", "SS2025", "WS2025", "SS2026",
];
const DEFAULT_START = "WS2021";
const MIN_COLUMNS = 6;

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`page is missing element #${id}`);
  }
  return node as T;
}

function apiBase(): string {
  const meta = document.querySelector<HTMLMetaElement>('meta[name="api-base"]');
  return meta?.content ?? "";
}

class App {
  private readonly api = new PlannerApi(apiBase());
  private readonly programSelect = byId<HTMLSelectElement>("program-select");
  private readonly startSelect = byId<HTMLSelectElement>("start-select");
  private readonly nowInput = byId<HTMLInputElement>("now-input");
  private readonly prefillBtn = byId<HTMLButtonElement>("prefill-btn");
  private readonly exportBtn = byId<HTMLButtonElement>("export-btn");
  private readonly importInput = byId<HTMLInputElement>("import-input");
  private readonly statusLine = byId<HTMLParagraphElement>("status");
  private readonly paletteEl = byId<HTMLDivElement>("palette");
  private readonly boardEl = byId<HTMLDivElement>("board");
  private readonly feedbackEl = byId<HTMLDivElement>("feedback");

  private programs: ProgramRef[] = [];
  private catalog: CatalogEntry[] = [];
  private board: PlanBoard | null = null;
  private validator: DebouncedValidator | null = null;
  private unsubscribe: (() => void) | null = null;
  private selectedCourse: string | null = null;
  private feedback: FeedbackState = { phase: "idle" };

  async init(): Promise<void> {
    for (const start of START_OPTIONS) {
      const opt = document.createElement("option");
      opt.value = start;
      opt.textContent = start;
      this.startSelect.appendChild(opt);
    }
    this.startSelect.value = DEFAULT_START;

    this.programSelect.addEventListener("change", () => {
      void this.loadProgram(this.programSelect.selectedIndex);
    });
    this.startSelect.addEventListener("change", () => this.restartWith({ start: this.startSelect.value }));
    this.nowInput.addEventListener("change", () => this.applyNow());
    this.prefillBtn.addEventListener("click", () => this.prefillRecommended());
    this.exportBtn.addEventListener("click", () => this.exportPlan());
    this.importInput.addEventListener("change", () => {
      void this.importPlan();
    });

    try {
      this.programs = await this.api.programs();
    } catch (exc) {
      this.status(`Cannot reach the planning service: ${describe(exc)}`);
      return;
    }
    if (this.programs.length === 0) {
      this.status("The service knows no programs; load data first.");
      return;
    }
    for (const program of this.programs) {
      const opt = document.createElement("option");
      opt.value = `${program.program_id}/${program.regulation_version}`;
      opt.textContent = `${program.program_id} (${program.regulation_version})`;
      this.programSelect.appendChild(opt);
    }
    await this.loadProgram(0);
  }

  private async loadProgram(index: number): Promise<void> {
    const program = this.programs[index];
    if (program === undefined) {
      return;
    }
    try {
      this.catalog = await this.api.catalog(program.program_id, program.regulation_version);
    } catch (exc) {
      this.status(`Cannot load the course catalog: ${describe(exc)}`);
      return;
    }
    this.status("");
    this.selectedCourse = null;
    const now = Number(this.nowInput.value) || 0;
    this.adoptBoard(
      new PlanBoard(program.program_id, program.regulation_version, this.startSelect.value, now),
    );
    this.renderPalette();
  }

  /** Swap in a board, rewire listeners, and kick off a validation pass. */
  private adoptBoard(board: PlanBoard): void {
    this.unsubscribe?.();
    this.validator?.dispose();
    this.board = board;
    this.validator = new DebouncedValidator(
      (doc: TimelineDocument) => this.api.validate(doc),
      {
        onReport: (report) => {
          this.feedback = { phase: "ready", report };
          this.exportBtn.disabled = !canExport(report);
          this.renderFeedback();
        },
        onError: (error) => {
          this.feedback = { phase: "error", message: describe(error) };
          this.renderFeedback();
        },
      },
    );
    this.unsubscribe = board.onChange(() => this.boardChanged());
    this.boardChanged();
  }

  private boardChanged(): void {
    if (this.board === null || this.validator === null) {
      return;
    }
    this.feedback = { phase: "checking" };
    this.renderBoard();
    this.renderFeedback();
    this.validator.schedule(this.board.toDocument());
  }

  /** Rebuild the board around a changed start semester, keeping all atoms. */
  private restartWith(change: { start: string }): void {
    if (this.board === null) {
      return;
    }
    const doc = this.board.toDocument();
    doc.start_semester = change.start;
    try {
      this.adoptBoard(PlanBoard.fromDocument(doc));
    } catch (exc) {
      this.status(describe(exc));
    }
  }

  private applyNow(): void {
    if (this.board === null) {
      return;
    }
    const value = Number(this.nowInput.value);
    try {
      this.board.setNow(value);
      this.status("");
    } catch (exc) {
      this.status(describe(exc));
      this.nowInput.value = String(this.board.now);
    }
  }

  private prefillRecommended(): void {
    if (this.board === null) {
      return;
    }
    const present = new Set(this.board.toDocument().atoms.map((a) => a.course));
    let placed = 0;
    for (const entry of this.catalog) {
      const sem = entry.recommended_semester;
      if (sem === null || sem <= this.board.now || present.has(entry.course_id)) {
        continue;
      }
      this.board.place(entry.course_id, sem);
      present.add(entry.course_id);
      placed += 1;
    }
    this.status(placed > 0 ? `Placed ${placed} course(s) at their recommended semesters.` : "Nothing to prefill.");
  }

  private exportPlan(): void {
    if (this.board === null || this.validator === null) {
      return;
    }
    try {
      const text = exportTimeline(this.board.toDocument(), this.validator.lastReport);
      const blob = new Blob([text], { type: "application/json" });
      const url = URL.createObjectURL(blob);
      const link = document.createElement("a");
      link.href = url;
      link.download = `${this.board.programId}-${this.board.regulationVersion}-plan.json`;
      link.click();
      URL.revokeObjectURL(url);
      this.status("Plan exported.");
    } catch (exc) {
      this.status(describe(exc));
    }
  }

  private async importPlan(): Promise<void> {
    const file = this.importInput.files?.[0];
    if (file === undefined) {
      return;
    }
    this.importInput.value = "";
    try {
      const doc = parseTimeline(await file.text());
      const board = PlanBoard.fromDocument(doc);
      if (START_OPTIONS.includes(doc.start_semester)) {
        this.startSelect.value = doc.start_semester;
      }
      this.nowInput.value = String(doc.now);
      const key = `${doc.program_id}/${doc.regulation_version}`;
      for (let i = 0; i < this.programSelect.options.length; i += 1) {
        if (this.programSelect.options[i]?.value === key) {
          this.programSelect.selectedIndex = i;
        }
      }
      this.adoptBoard(board);
      this.status(`Imported plan with ${doc.atoms.length} entries.`);
    } catch (exc) {
      this.status(`Import failed: ${describe(exc)}`);
    }
  }

  private renderPalette(): void {
    this.paletteEl.replaceChildren();
    for (const entry of this.catalog) {
      const chip = document.createElement("button");
      chip.type = "button";
      chip.className = "chip course" + (entry.course_id === this.selectedCourse ? " selected" : "");
      chip.title = `${entry.title} (${entry.credit_points} CP, ${entry.offered_terms})`;
      chip.textContent = `${entry.course_id} ${entry.mandatory ? "" : "*"}`.trim();
      chip.addEventListener("click", () => {
        this.selectedCourse = this.selectedCourse === entry.course_id ? null : entry.course_id;
        this.renderPalette();
      });
      this.paletteEl.appendChild(chip);
    }
  }

  private renderBoard(): void {
    if (this.board === null) {
      return;
    }
    const board = this.board;
    this.boardEl.replaceChildren();
    const columns = Math.max(board.lastSemester() + 1, MIN_COLUMNS);
    for (let sem = 1; sem <= columns; sem += 1) {
      const column = document.createElement("div");
      column.className = "column" + (sem <= board.now ? " past" : "");
      const header = document.createElement("h3");
      header.textContent = sem <= board.now ? `Semester ${sem} (done)` : `Semester ${sem}`;
      column.appendChild(header);
      for (const fact of board.factsIn(sem)) {
        const chip = document.createElement("div");
        chip.className = `chip fact ${fact.kind}`;
        chip.textContent = `${fact.course} (${fact.kind})`;
        column.appendChild(chip);
      }
      for (const course of board.plannedIn(sem)) {
        const chip = document.createElement("div");
        chip.className = "chip planned";
        const label = document.createElement("span");
        label.textContent = course;
        const drop = document.createElement("button");
        drop.type = "button";
        drop.className = "remove";
        drop.textContent = "x";
        drop.title = `Remove ${course} from semester ${sem}`;
        drop.addEventListener("click", (ev) => {
          ev.stopPropagation();
          board.remove(course, sem);
        });
        chip.append(label, drop);
        column.appendChild(chip);
      }
      column.addEventListener("click", () => this.placeSelected(sem));
      this.boardEl.appendChild(column);
    }
  }

  private placeSelected(sem: number): void {
    if (this.board === null || this.selectedCourse === null) {
      return;
    }
    try {
      this.board.place(this.selectedCourse, sem);
      this.status("");
    } catch (exc) {
      this.status(describe(exc));
    }
  }

  private renderFeedback(): void {
    this.feedbackEl.innerHTML = renderFeedbackHtml(this.feedback);
  }

  private status(message: string): void {
    this.statusLine.textContent = message;
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    return `${error.message} (HTTP ${error.status})`;
  }
  if (
    error instanceof BoardError ||
    error instanceof ExchangeError ||
    error instanceof ExportBlockedError
  ) {
    return error.message;
  }
  return error instanceof Error ? error.message : String(error);
}

void new App().init();
