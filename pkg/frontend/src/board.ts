import { EventAtom, TimelineDocument } from "./types.js";

/** Raised when a board edit would produce a timeline the service rejects. */
export class BoardError extends Error {}

function slotKey(course: string, sem: number): string {
  return `${course}@${sem}`;
}

/**
 * Mutable editing state behind the planning board.
 *
 * The past (facts at or before `now`) is fixed; only `planned_take` atoms
 * in future semesters can be placed, moved, or removed. Every mutator
 * enforces the timeline invariants up front so the document handed to the
 * validator is always well-formed.
 */
export class PlanBoard {
  readonly programId: string;
  readonly regulationVersion: string;
  readonly startSemester: string;

  private _now: number;
  private facts: EventAtom[];
  private planned = new Map<string, EventAtom>();
  private listeners: Array<() => void> = [];

  constructor(programId: string, regulationVersion: string, startSemester: string, now = 0) {
    if (!Number.isInteger(now) || now < 0) {
      throw new BoardError(`now must be an integer >= 0, got ${now}`);
    }
    this.programId = programId;
    this.regulationVersion = regulationVersion;
    this.startSemester = startSemester;
    this._now = now;
    this.facts = [];
  }

  /** Rebuild a board from an imported exchange document. */
  static fromDocument(doc: TimelineDocument): PlanBoard {
    const board = new PlanBoard(
      doc.program_id,
      doc.regulation_version,
      doc.start_semester,
      doc.now,
    );
    for (const atom of doc.atoms) {
      if (atom.kind === "planned_take") {
        board.place(atom.course, atom.sem);
      } else {
        if (atom.sem > doc.now) {
          throw new BoardError(
            `${atom.kind} ${atom.course} at semester ${atom.sem} lies after now=${doc.now}`,
          );
        }
        board.facts.push({ ...atom });
      }
    }
    return board;
  }

  get now(): number {
    return this._now;
  }

  /**
   * Move the history boundary. Refuses to swallow existing atoms: facts
   * must stay at or before `now`, planned courses strictly after it.
   */
  setNow(value: number): void {
    if (!Number.isInteger(value) || value < 0) {
      throw new BoardError(`now must be an integer >= 0, got ${value}`);
    }
    for (const fact of this.facts) {
      if (fact.sem > value) {
        throw new BoardError(
          `cannot set now=${value}: ${fact.kind} ${fact.course} is recorded in semester ${fact.sem}`,
        );
      }
    }
    for (const atom of this.planned.values()) {
      if (atom.sem <= value) {
        throw new BoardError(
          `cannot set now=${value}: ${atom.course} is planned for semester ${atom.sem}; move or remove it first`,
        );
      }
    }
    this._now = value;
    this.emit();
  }

  /** Plan a course for a future semester. */
  place(course: string, sem: number): void {
    if (!Number.isInteger(sem) || sem < 1) {
      throw new BoardError(`semester index must be an integer >= 1, got ${sem}`);
    }
    if (sem <= this._now) {
      throw new BoardError(
        `cannot plan ${course} in semester ${sem}: it is not after now=${this._now}`,
      );
    }
    const key = slotKey(course, sem);
    if (this.planned.has(key)) {
      throw new BoardError(`${course} is already planned for semester ${sem}`);
    }
    this.planned.set(key, { kind: "planned_take", course, sem });
    this.emit();
  }

  /** Remove a planned course; history cannot be removed. */
  remove(course: string, sem: number): boolean {
    const removed = this.planned.delete(slotKey(course, sem));
    if (removed) {
      this.emit();
    }
    return removed;
  }

  move(course: string, fromSem: number, toSem: number): void {
    if (fromSem === toSem) {
      return;
    }
    const key = slotKey(course, fromSem);
    if (!this.planned.has(key)) {
      throw new BoardError(`${course} is not planned for semester ${fromSem}`);
    }
    if (toSem <= this._now) {
      throw new BoardError(
        `cannot plan ${course} in semester ${toSem}: it is not after now=${this._now}`,
      );
    }
    if (this.planned.has(slotKey(course, toSem))) {
      throw new BoardError(`${course} is already planned for semester ${toSem}`);
    }
    this.planned.delete(key);
    this.planned.set(slotKey(course, toSem), { kind: "planned_take", course, sem: toSem });
    this.emit();
  }

  /** Planned course ids in one semester, sorted for stable rendering. */
  plannedIn(sem: number): string[] {
    const out: string[] = [];
    for (const atom of this.planned.values()) {
      if (atom.sem === sem) {
        out.push(atom.course);
      }
    }
    return out.sort();
  }

  /** Recorded (non-planned) atoms in one semester, in import order. */
  factsIn(sem: number): EventAtom[] {
    return this.facts.filter((a) => a.sem === sem).map((a) => ({ ...a }));
  }

  plannedCount(): number {
    return this.planned.size;
  }

  /** Highest semester index touched by any atom, at least `now`. */
  lastSemester(): number {
    let last = this._now;
    for (const atom of this.facts) {
      last = Math.max(last, atom.sem);
    }
    for (const atom of this.planned.values()) {
      last = Math.max(last, atom.sem);
    }
    return last;
  }

  /** Snapshot the board as an exchange document, atoms sorted by (sem, course). */
  toDocument(): TimelineDocument {
    const atoms = [...this.facts.map((a) => ({ ...a })), ...this.planned.values()];
    atoms.sort((a, b) => a.sem - b.sem || a.course.localeCompare(b.course));
    return {
      program_id: this.programId,
      regulation_version: this.regulationVersion,
      start_semester: this.startSemester,
      now: this._now,
      atoms: atoms.map((a) => ({ ...a })),
    };
  }

  onChange(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((fn) => fn !== listener);
    };
  }

  private emit(): void {
    for (const listener of [...this.listeners]) {
      listener();
    }
  }
}
