/** Minimal RFC-4180 CSV reader: quoted fields, escaped quotes, CRLF. */

import * as fs from "fs";

import { EmptyData } from "./schema";

export function parseCsv(text: string): string[][] {
  const rows: string[][] = [];
  let field = "";
  let row: string[] = [];
  let inQuotes = false;
  let i = 0;
  const push = () => {
    row.push(field);
    field = "";
  };
  const endRow = () => {
    push();
    rows.push(row);
    row = [];
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
      push();
      i += 1;
    } else if (ch === "\r" && text[i + 1] === "\n") {
      endRow();
      i += 2;
    } else if (ch === "\n") {
      endRow();
      i += 1;
    } else {
      field += ch;
      i += 1;
    }
  }
  if (field.length > 0 || row.length > 0) {
    endRow();
  }
  return rows;
}

export function readCsvFile(path: string): { header: string[]; records: string[][] } {
  const text = fs.readFileSync(path, "utf8");
  const rows = parseCsv(text).filter((r) => !(r.length === 1 && r[0] === ""));
  if (rows.length === 0) {
    throw new EmptyData(`${path}: file is empty`);
  }
  const [header, ...records] = rows;
  if (records.length === 0) {
    throw new EmptyData(`${path}: header only, no data rows`);
  }
  return { header, records };
}
