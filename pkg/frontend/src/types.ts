/** Wire types for the study-planning HTTP API. */

export type AtomKind =
  | "passed"
  | "failed"
  | "registered"
  | "deregistered"
  | "planned_take";

export const ATOM_KINDS: readonly AtomKind[] = [
  "passed",
  "failed",
  "registered",
  "deregistered",
  "planned_take",
];

/** One recorded or planned study event at a 1-based relative semester index. */
export interface EventAtom {
  kind: AtomKind;
  course: string;
  sem: number;
}

/**
 * A student's past record plus planned courses, as exchanged with
 * POST /api/validate and the import/export files.
 *
 * `now` is the last completed semester: atoms at or before it are history,
 * `planned_take` atoms must lie strictly after it. `start_semester` anchors
 * relative indices to calendar terms, e.g. "WS2021" or "SS2022".
 */
export interface TimelineDocument {
  program_id: string;
  regulation_version: string;
  start_semester: string;
  now: number;
  atoms: EventAtom[];
}

/** One violation or warning, anchored to a rule and a semester. */
export interface ReportEntry {
  rule_id: string;
  semester: number;
  courses: string[];
  message: string;
  actual: number | null;
  required: number | null;
}

export interface ValidationReport {
  violations: ReportEntry[];
  warnings: ReportEntry[];
  trajectories: Record<string, number[]>;
}

export interface ProgramRef {
  program_id: string;
  regulation_version: string;
}

export interface CatalogEntry {
  course_id: string;
  title: string;
  credit_points: number;
  offered_terms: string;
  mandatory: boolean;
  recommended_semester: number | null;
}
