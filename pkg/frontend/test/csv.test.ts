import { describe, expect, it } from "vitest";

import { CURVE_HEADER, CsvSchemaError, parseCurveCsv } from "../src/csv.js";

const GOOD = `${CURVE_HEADER}\n6.0,0.5,0.5\n6.1,0.45,0.75\n`;

describe("parseCurveCsv", () => {
  it("parses rows and preserves raw strings", () => {
    const curve = parseCurveCsv(GOOD, "good.csv");
    expect(curve.tPrime).toEqual([6.0, 6.1]);
    expect(curve.fMinus).toEqual([0.5, 0.75]);
    expect(curve.raw.fPlus).toEqual(["0.5", "0.45"]);
    expect(curve.raw.tPrime).toEqual(["6.0", "6.1"]);
  });

  it("keeps full-precision strings verbatim", () => {
    const value = "0.7999999600000045";
    const curve = parseCurveCsv(`${CURVE_HEADER}\n6.283892413887165,${value},${value}\n`, "p.csv");
    expect(curve.raw.fPlus[0]).toBe(value);
    expect(curve.fPlus[0]).toBeCloseTo(0.79999996, 12);
  });

  it("rejects a wrong header", () => {
    expect(() => parseCurveCsv("t,fp,fm\n1,2,3\n", "bad.csv")).toThrow(CsvSchemaError);
    expect(() => parseCurveCsv(`${CURVE_HEADER};\n1,2,3\n`, "bad.csv")).toThrow(/header/);
  });

  it("rejects empty data", () => {
    expect(() => parseCurveCsv(`${CURVE_HEADER}\n`, "empty.csv")).toThrow(/no data rows/);
  });

  it("rejects malformed rows", () => {
    expect(() => parseCurveCsv(`${CURVE_HEADER}\n1,2\n`, "short.csv")).toThrow(/3 columns/);
    expect(() => parseCurveCsv(`${CURVE_HEADER}\n1,2,abc\n`, "nan.csv")).toThrow(/finite/);
    expect(() => parseCurveCsv(`${CURVE_HEADER}\n1,2,inf\n`, "inf.csv")).toThrow(/finite/);
  });
});
