import { ATOM_KINDS, AtomKind, EventAtom, TimelineDocument, ValidationReport } from "./types.js";

/** Raised when an imported file does not match the timeline exchange format. */
export class ExchangeError extends Error {}

/** Raised when an export is attempted while hard violations are unresolved. */
export class ExportBlockedError extends Error {}

const SEMESTER_RE = /^(WS|SS)\d{4}$/;

function fail(message: string): never {
  throw new ExchangeError(message);
}

function asRecord(value: unknown, what: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    fail(`${what} must be a JSON object`);
  }
  return value as Record<string, unknown>;
}

function asString(value: unknown, field: string): string {
  if (typeof value !== "string" || value === "") {
    fail(`field '${field}' must be a non-empty string`);
  }
  return value;
}

function asIndex(value: unknown, field: string, min: number): number {
  if (typeof value !== "number" || !Number.isInteger(value) || value < min) {
    fail(`field '${field}' must be an integer >= ${min}`);
  }
  return value;
}

function parseAtom(value: unknown, position: number, now: number, planned: Set<string>): EventAtom {
  const raw = asRecord(value, `atoms[${position}]`);
  const kind = asString(raw.kind, `atoms[${position}].kind`);
  if (!ATOM_KINDS.includes(kind as AtomKind)) {
    fail(`atoms[${position}].kind '${kind}' is not one of ${ATOM_KINDS.join(", ")}`);
  }
  const course = asString(raw.course, `atoms[${position}].course`);
  const sem = asIndex(raw.sem, `atoms[${position}].sem`, 1);
  if (kind === "planned_take") {
    if (sem <= now) {
      fail(`planned_take ${course} at semester ${sem} is not after now=${now}`);
    }
    const slot = `${course}@${sem}`;
    if (planned.has(slot)) {
      fail(`duplicate planned_take for ${course} in semester ${sem}`);
    }
    planned.add(slot);
  } else if (sem > now) {
    fail(`${kind} ${course} at semester ${sem} lies after now=${now}`);
  }
  return { kind: kind as AtomKind, course, sem };
}

/**
 * Parse and structurally validate an exchange document.
 *
 * Applies the same constraints the service enforces, so anything accepted
 * here will not bounce with a 400 when posted for validation. Unknown
 * fields are dropped.
 */
export function parseTimeline(text: string): TimelineDocument {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (exc) {
    fail(`not valid JSON: ${(exc as Error).message}`);
  }
  const doc = asRecord(raw, "timeline");
  const programId = asString(doc.program_id, "program_id");
  const version = asString(doc.regulation_version, "regulation_version");
  const start = asString(doc.start_semester, "start_semester");
  if (!SEMESTER_RE.test(start)) {
    fail(`start_semester '${start}' must look like WS2021 or SS2022`);
  }
  const now = asIndex(doc.now, "now", 0);
  if (!Array.isArray(doc.atoms)) {
    fail("field 'atoms' must be an array");
  }
  const planned = new Set<string>();
  const atoms = doc.atoms.map((atom, i) => parseAtom(atom, i, now, planned));
  return {
    program_id: programId,
    regulation_version: version,
    start_semester: start,
    now,
    atoms,
  };
}

/** Serialize a document in the exchange layout: 2-space indent, trailing newline. */
export function serializeTimeline(doc: TimelineDocument): string {
  const ordered = {
    program_id: doc.program_id,
    regulation_version: doc.regulation_version,
    start_semester: doc.start_semester,
    now: doc.now,
    atoms: doc.atoms.map((a) => ({ kind: a.kind, course: a.course, sem: a.sem })),
  };
  return JSON.stringify(ordered, null, 2) + "\n";
}

/**
 * Whether the current plan may be saved to a file.
 *
 * Only hard violations block export; advisory findings from default rules
 * are exactly the kind of plan a student may want to keep. An unvalidated
 * plan is also exportable, otherwise a service outage would hold drafts
 * hostage.
 */
export function canExport(report: ValidationReport | null): boolean {
  return report === null || report.violations.length === 0;
}

export function exportTimeline(doc: TimelineDocument, report: ValidationReport | null): string {
  if (!canExport(report)) {
    const count = report === null ? 0 : report.violations.length;
    throw new ExportBlockedError(
      `plan has ${count} unresolved violation(s); fix them before exporting`,
    );
  }
  return serializeTimeline(doc);
}
