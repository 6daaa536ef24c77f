/**
 * Versioned CSV reader for contmech experiment outputs.
 *
 * Files must open with the literal schema tag line `# contmech-v1`, then a
 * header row, then data rows. Anything else is rejected so a plot can never
 * silently misread a foreign file.
 */

export const SCHEMA_TAG = "# contmech-v1";

export class SchemaError extends Error {}
export class EmptyDataError extends Error {}

export interface CsvTable {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): CsvTable {
  const lines = text.split(/\r?\n/);
  if (lines.length === 0 || lines[0].trim() !== SCHEMA_TAG) {
    throw new SchemaError(
      `expected schema tag ${SCHEMA_TAG}, got ${JSON.stringify(lines[0] ?? "")}`,
    );
  }
  if (lines.length < 2 || lines[1].trim() === "") {
    throw new SchemaError("missing header row");
  }
  const header = lines[1].split(",").map((s) => s.trim());
  const rows: string[][] = [];
  for (const line of lines.slice(2)) {
    if (line.trim() === "") continue;
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(
        `row has ${cells.length} cells, header has ${header.length}: ${line}`,
      );
    }
    rows.push(cells.map((s) => s.trim()));
  }
  return { header, rows };
}

export function requireNumeric(table: CsvTable, column: string): number[] {
  const idx = table.header.indexOf(column);
  if (idx < 0) {
    throw new SchemaError(`missing column ${JSON.stringify(column)}`);
  }
  return table.rows.map((row) => {
    const v = Number(row[idx]);
    if (!Number.isFinite(v)) {
      throw new SchemaError(`non-numeric value in ${column}: ${row[idx]}`);
    }
    return v;
  });
}

export function column(table: CsvTable, name: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`missing column ${JSON.stringify(name)}`);
  }
  return table.rows.map((row) => row[idx]);
}
