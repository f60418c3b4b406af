import * as fs from 'fs';

export interface CsvTable {
  schemaLine: string;
  columns: string[];
  rows: string[][];
}

/**
 * Read a risdcsk result CSV: '#' comment lines (the first carries the schema
 * id), then a header row, then comma-separated data rows.
 */
export function readCsv(path: string): CsvTable {
  const text = fs.readFileSync(path, 'utf-8');
  let schemaLine = '';
  let columns: string[] | null = null;
  const rows: string[][] = [];
  for (const line of text.split('\n')) {
    if (!line.trim()) continue;
    if (line.startsWith('#')) {
      if (!schemaLine) schemaLine = line.replace(/^#\s*/, '');
      continue;
    }
    if (columns === null) {
      columns = line.split(',');
    } else {
      rows.push(line.split(','));
    }
  }
  if (columns === null) {
    throw new Error(`${path}: no header row found`);
  }
  if (rows.length === 0) {
    throw new Error(`${path}: no data rows`);
  }
  return { schemaLine, columns, rows };
}

/** Numeric column accessor; throws when the column is missing. */
export function column(table: CsvTable, name: string, path = ''): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new Error(
      `${path}: column '${name}' not in schema (have: ${table.columns.join(', ')})`,
    );
  }
  return table.rows.map((r) => Number(r[idx]));
}
