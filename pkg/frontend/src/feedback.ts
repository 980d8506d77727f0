import { ReportEntry, ValidationReport } from "./types.js";

export type FeedbackState =
  | { phase: "idle" }
  | { phase: "checking" }
  | { phase: "ready"; report: ValidationReport }
  | { phase: "error"; message: string };

export interface FeedbackRow {
  severity: "violation" | "warning";
  ruleId: string;
  semester: number;
  courses: string[];
  message: string;
}

/** Flatten a report into renderable rows, hard violations first. */
export function feedbackRows(report: ValidationReport): FeedbackRow[] {
  const row = (entry: ReportEntry, severity: FeedbackRow["severity"]): FeedbackRow => ({
    severity,
    ruleId: entry.rule_id,
    semester: entry.semester,
    courses: [...entry.courses],
    message: entry.message,
  });
  return [
    ...report.violations.map((e) => row(e, "violation")),
    ...report.warnings.map((e) => row(e, "warning")),
  ];
}

export function summaryLine(state: FeedbackState): string {
  switch (state.phase) {
    case "idle":
      return "Edit the plan to check it against the regulations.";
    case "checking":
      return "Checking plan...";
    case "error":
      return `Validation failed: ${state.message}`;
    case "ready": {
      const { violations, warnings } = state.report;
      if (violations.length > 0) {
        return `${violations.length} rule violation(s).`;
      }
      if (warnings.length > 0) {
        return `No violations; ${warnings.length} advisory note(s).`;
      }
      return "Plan satisfies all checked rules.";
    }
  }
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/**
 * Render the feedback pane as an HTML fragment.
 *
 * Kept as a pure string builder so it can be tested without a DOM; the
 * page shell assigns the result to `innerHTML`. All dynamic text is
 * escaped.
 */
export function renderFeedbackHtml(state: FeedbackState): string {
  const parts: string[] = [];
  parts.push(`<p class="summary ${state.phase}">${escapeHtml(summaryLine(state))}</p>`);
  if (state.phase !== "ready") {
    return parts.join("\n");
  }
  const rows = feedbackRows(state.report);
  if (rows.length > 0) {
    parts.push('<ul class="findings">');
    for (const r of rows) {
      const courses = r.courses.length > 0 ? ` [${r.courses.join(", ")}]` : "";
      parts.push(
        `<li class="${r.severity}">` +
          `<span class="rule">${escapeHtml(r.ruleId)}</span> ` +
          `<span class="sem">sem ${r.semester}</span>` +
          `${escapeHtml(courses)}: ${escapeHtml(r.message)}</li>`,
      );
    }
    parts.push("</ul>");
  }
  const cp = state.report.trajectories["cp"];
  if (cp && cp.length > 0) {
    parts.push(`<p class="trajectory">Credit points by semester: ${cp.join(", ")}</p>`);
  }
  return parts.join("\n");
}
