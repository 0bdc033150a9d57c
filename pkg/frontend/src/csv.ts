/**
 * Strict reader for the fidelity-curve CSV contract.
 *
 * Schema: header exactly `t_prime,f_plus,f_minus`, one row per grid point,
 * '.' decimal separator, LF line endings. Raw value strings are preserved
 * verbatim alongside the parsed numbers so downstream consumers can prove
 * no numeric transformation happened.
 */

export const CURVE_HEADER = "t_prime,f_plus,f_minus";

export interface CurveData {
  /** source path, for error messages */
  source: string;
  tPrime: number[];
  fPlus: number[];
  fMinus: number[];
  /** untouched cell strings, column-major */
  raw: { tPrime: string[]; fPlus: string[]; fMinus: string[] };
}

export class CsvSchemaError extends Error {}

function parseCell(cell: string, where: string): number {
  const value = Number(cell);
  if (cell.trim() === "" || !Number.isFinite(value)) {
    throw new CsvSchemaError(`${where}: not a finite number: ${JSON.stringify(cell)}`);
  }
  return value;
}

export function parseCurveCsv(text: string, source: string): CurveData {
  const lines = text.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length === 0 || lines[0] !== CURVE_HEADER) {
    throw new CsvSchemaError(
      `${source}: header must be exactly "${CURVE_HEADER}", got "${lines[0] ?? ""}"`,
    );
  }
  const rows = lines.slice(1);
  if (rows.length === 0) {
    throw new CsvSchemaError(`${source}: no data rows`);
  }
  const data: CurveData = {
    source,
    tPrime: [],
    fPlus: [],
    fMinus: [],
    raw: { tPrime: [], fPlus: [], fMinus: [] },
  };
  rows.forEach((row, index) => {
    const cells = row.split(",");
    if (cells.length !== 3) {
      throw new CsvSchemaError(`${source}:${index + 2}: expected 3 columns, got ${cells.length}`);
    }
    data.tPrime.push(parseCell(cells[0], `${source}:${index + 2} t_prime`));
    data.fPlus.push(parseCell(cells[1], `${source}:${index + 2} f_plus`));
    data.fMinus.push(parseCell(cells[2], `${source}:${index + 2} f_minus`));
    data.raw.tPrime.push(cells[0]);
    data.raw.fPlus.push(cells[1]);
    data.raw.fMinus.push(cells[2]);
  });
  return data;
}
