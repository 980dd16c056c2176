/**
 * Strict CSV reader for the harness output schemas.
 *
 * The generator never quotes fields, so a plain split is exact. Parsing
 * fails loudly on schema mismatches instead of guessing.
 */

export interface Table {
  columns: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV: no header row");
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(
        `row ${i + 2} has ${cells.length} cells, header has ${columns.length}`,
      );
    }
    return cells;
  });
  return { columns, rows };
}

/** Column accessors for the named fields; lists what is missing. */
export function requireColumns(
  table: Table,
  needed: string[],
): Map<string, number> {
  const index = new Map<string, number>();
  for (const name of needed) {
    const i = table.columns.indexOf(name);
    if (i < 0) {
      throw new SchemaError(
        `missing columns: expected [${needed.join(", ")}], ` +
          `found [${table.columns.join(", ")}]`,
      );
    }
    index.set(name, i);
  }
  if (table.rows.length === 0) {
    throw new SchemaError("CSV has a header but no data rows");
  }
  return index;
}

export function num(cell: string): number {
  const v = Number(cell);
  if (!Number.isFinite(v)) {
    throw new SchemaError(`expected a number, got '${cell}'`);
  }
  return v;
}
