import { describe, expect, it } from "vitest";
import { feedbackRows, renderFeedbackHtml, summaryLine } from "../src/feedback.js";
import type { ValidationReport } from "../src/types.js";

const mixed: ValidationReport = {
  violations: [
    {
      rule_id: "R2",
      semester: 2,
      courses: ["SEM"],
      message: "pass(PROSEM) must come before take(SEM)",
      actual: null,
      required: null,
    },
  ],
  warnings: [
    {
      rule_id: "R4",
      semester: 2,
      courses: ["IDS"],
      message: "recommended: pass(STAT) before take(IDS)",
      actual: null,
      required: null,
    },
  ],
  trajectories: { cp: [30, 51] },
};

describe("rows", () => {
  it("lists violations before warnings with matching severities", () => {
    const rows = feedbackRows(mixed);
    expect(rows.map((r) => [r.severity, r.ruleId])).toEqual([
      ["violation", "R2"],
      ["warning", "R4"],
    ]);
  });
});

describe("summary", () => {
  it("describes each phase", () => {
    expect(summaryLine({ phase: "idle" })).toMatch(/Edit the plan/);
    expect(summaryLine({ phase: "checking" })).toMatch(/Checking/);
    expect(summaryLine({ phase: "error", message: "no rules for program EE" })).toMatch(
      /Validation failed: no rules for program EE/,
    );
    expect(summaryLine({ phase: "ready", report: mixed })).toBe("1 rule violation(s).");
    expect(
      summaryLine({ phase: "ready", report: { ...mixed, violations: [] } }),
    ).toBe("No violations; 1 advisory note(s).");
    expect(
      summaryLine({ phase: "ready", report: { violations: [], warnings: [], trajectories: {} } }),
    ).toBe("Plan satisfies all checked rules.");
  });
});

describe("html", () => {
  it("renders findings with severity classes and the cp trajectory", () => {
    const html = renderFeedbackHtml({ phase: "ready", report: mixed });
    expect(html).toContain('<li class="violation">');
    expect(html).toContain('<li class="warning">');
    expect(html).toContain("Credit points by semester: 30, 51");
  });

  it("escapes markup in dynamic text", () => {
    const hostile: ValidationReport = {
      violations: [
        {
          rule_id: "R1",
          semester: 1,
          courses: ["<script>"],
          message: 'needs <b>more</b> "credit"',
          actual: 0,
          required: 60,
        },
      ],
      warnings: [],
      trajectories: {},
    };
    const html = renderFeedbackHtml({ phase: "ready", report: hostile });
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
    expect(html).toContain("&lt;b&gt;more&lt;/b&gt; &quot;credit&quot;");
  });
});
