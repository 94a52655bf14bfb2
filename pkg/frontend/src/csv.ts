/** Minimal RFC-4180 CSV reader for the workbench's output schema. */

export interface CsvTable {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): CsvTable {
  const records: string[][] = [];
  let field = "";
  let record: string[] = [];
  let inQuotes = false;
  let i = 0;

  const endField = () => {
    record.push(field);
    field = "";
  };
  const endRecord = () => {
    endField();
    records.push(record);
    record = [];
  };

  while (i < text.length) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i += 1;
        continue;
      }
      field += ch;
      i += 1;
      continue;
    }
    if (ch === '"') {
      inQuotes = true;
      i += 1;
    } else if (ch === ",") {
      endField();
      i += 1;
    } else if (ch === "\r") {
      i += 1; // swallow; the \n ends the record
    } else if (ch === "\n") {
      endRecord();
      i += 1;
    } else {
      field += ch;
      i += 1;
    }
  }
  if (field.length > 0 || record.length > 0) {
    endRecord();
  }
  if (records.length === 0) {
    throw new Error("CSV input is empty");
  }
  const [header, ...rows] = records;
  return { header, rows: rows.filter((r) => !(r.length === 1 && r[0] === "")) };
}

export function columnIndex(table: CsvTable, name: string): number {
  const index = table.header.indexOf(name);
  if (index < 0) {
    throw new Error(
      `column '${name}' missing from CSV header [${table.header.join(", ")}]`,
    );
  }
  return index;
}

export function numericColumn(table: CsvTable, name: string): number[] {
  const index = columnIndex(table, name);
  return table.rows.map((row) => Number(row[index]));
}
