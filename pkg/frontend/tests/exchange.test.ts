import { describe, expect, it } from "vitest";
import {
  ExchangeError,
  ExportBlockedError,
  canExport,
  exportTimeline,
  parseTimeline,
  serializeTimeline,
} from "../src/exchange.js";
import type { TimelineDocument, ValidationReport } from "../src/types.js";

const plan: TimelineDocument = {
  program_id: "CS",
  regulation_version: "2018",
  start_semester: "WS2021",
  now: 0,
  atoms: [
    { kind: "planned_take", course: "MATH1", sem: 1 },
    { kind: "planned_take", course: "PROSEM", sem: 2 },
    { kind: "planned_take", course: "SEM", sem: 3 },
  ],
};

describe("serialization", () => {
  it("round-trips a document through serialize and parse", () => {
    expect(parseTimeline(serializeTimeline(plan))).toEqual(plan);
  });

  it("writes 2-space indented JSON with a trailing newline", () => {
    const text = serializeTimeline(plan);
    expect(text.endsWith("}\n")).toBe(true);
    expect(text).toContain('\n  "program_id": "CS"');
    expect(text).toContain('"kind": "planned_take"');
  });

  it("accepts history facts at or before now and planned work after it", () => {
    const mixed = serializeTimeline({
      program_id: "CS",
      regulation_version: "2018",
      start_semester: "SS2022",
      now: 2,
      atoms: [
        { kind: "passed", course: "MATH1", sem: 1 },
        { kind: "failed", course: "STAT", sem: 1 },
        { kind: "registered", course: "STAT", sem: 2 },
        { kind: "planned_take", course: "SEM", sem: 3 },
      ],
    });
    const doc = parseTimeline(mixed);
    expect(doc.now).toBe(2);
    expect(doc.atoms).toHaveLength(4);
  });
});

describe("export gate", () => {
  it("keeps plans with only advisory findings exportable", () => {
    const advisoriesOnly: ValidationReport = {
      violations: [],
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
    expect(canExport(advisoriesOnly)).toBe(true);
    const text = exportTimeline(plan, advisoriesOnly);
    expect(parseTimeline(text)).toEqual(plan);
  });

  it("allows exporting before any validation has finished", () => {
    expect(canExport(null)).toBe(true);
    expect(parseTimeline(exportTimeline(plan, null))).toEqual(plan);
  });

  it("blocks export while hard violations are unresolved", () => {
    const broken: ValidationReport = {
      violations: [
        {
          rule_id: "R1",
          semester: 3,
          courses: [],
          message: "sum(cp) is 54, required >= 60 by semester 3",
          actual: 54,
          required: 60,
        },
      ],
      warnings: [],
      trajectories: { cp: [30, 42, 54] },
    };
    expect(canExport(broken)).toBe(false);
    expect(() => exportTimeline(plan, broken)).toThrow(ExportBlockedError);
    expect(() => exportTimeline(plan, broken)).toThrow(/1 unresolved violation/);
  });
});

describe("import validation", () => {
  function mutate(change: (doc: Record<string, unknown>) => void): string {
    const doc = JSON.parse(serializeTimeline(plan)) as Record<string, unknown>;
    change(doc);
    return JSON.stringify(doc);
  }

  it("rejects text that is not JSON", () => {
    expect(() => parseTimeline("{oops")).toThrow(ExchangeError);
    expect(() => parseTimeline("{oops")).toThrow(/not valid JSON/);
  });

  it("rejects a missing program id", () => {
    const text = mutate((doc) => {
      delete doc.program_id;
    });
    expect(() => parseTimeline(text)).toThrow(/program_id/);
  });

  it("rejects a malformed start semester", () => {
    const text = mutate((doc) => {
      doc.start_semester = "winter 2021";
    });
    expect(() => parseTimeline(text)).toThrow(/WS2021 or SS2022/);
  });

  it("rejects unknown atom kinds", () => {
    const text = mutate((doc) => {
      (doc.atoms as Array<Record<string, unknown>>)[0]!.kind = "audited";
    });
    expect(() => parseTimeline(text)).toThrow(/'audited' is not one of/);
  });

  it("rejects planned work at or before now", () => {
    const text = mutate((doc) => {
      doc.now = 1;
    });
    expect(() => parseTimeline(text)).toThrow(/not after now=1/);
  });

  it("rejects history recorded after now", () => {
    const text = mutate((doc) => {
      (doc.atoms as Array<Record<string, unknown>>)[2]!.kind = "passed";
    });
    expect(() => parseTimeline(text)).toThrow(/lies after now=0/);
  });

  it("rejects duplicate planned slots", () => {
    const text = mutate((doc) => {
      const atoms = doc.atoms as Array<Record<string, unknown>>;
      atoms.push({ ...atoms[0]! });
    });
    expect(() => parseTimeline(text)).toThrow(/duplicate planned_take for MATH1/);
  });

  it("rejects fractional or sub-1 semester indices", () => {
    for (const bad of [0, -1, 1.5]) {
      const text = mutate((doc) => {
        (doc.atoms as Array<Record<string, unknown>>)[0]!.sem = bad;
      });
      expect(() => parseTimeline(text)).toThrow(ExchangeError);
    }
  });

  it("drops fields outside the exchange format", () => {
    const text = mutate((doc) => {
      doc.color = "green";
      (doc.atoms as Array<Record<string, unknown>>)[0]!.note = "retake";
    });
    const doc = parseTimeline(text);
    expect(doc).toEqual(plan);
    expect("color" in doc).toBe(false);
  });
});
