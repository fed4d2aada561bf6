import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { describe, expect, it } from "vitest";

import { parseCsv, readCsvFile } from "../src/csv";
import { EmptyData, RESULT_COLUMNS, SchemaError, checkHeader } from "../src/schema";

function tmpFile(content: string): string {
  const p = path.join(fs.mkdtempSync(path.join(os.tmpdir(), "plots-")), "t.csv");
  fs.writeFileSync(p, content);
  return p;
}

describe("parseCsv", () => {
  it("splits plain rows", () => {
    expect(parseCsv("a,b,c\n1,2,3\n")).toEqual([["a", "b", "c"], ["1", "2", "3"]]);
  });

  it("handles quoted fields with commas, quotes, and newlines", () => {
    const text = '"a,b","say ""hi""","line\nbreak"\n';
    expect(parseCsv(text)).toEqual([["a,b", 'say "hi"', "line\nbreak"]]);
  });

  it("handles CRLF line endings", () => {
    expect(parseCsv("a,b\r\n1,2\r\n")).toEqual([["a", "b"], ["1", "2"]]);
  });

  it("keeps the last row without a trailing newline", () => {
    expect(parseCsv("a,b\n1,2")).toEqual([["a", "b"], ["1", "2"]]);
  });
});

describe("readCsvFile", () => {
  it("separates header from records", () => {
    const p = tmpFile("x,y\n1,2\n3,4\n");
    const { header, records } = readCsvFile(p);
    expect(header).toEqual(["x", "y"]);
    expect(records).toHaveLength(2);
  });

  it("rejects empty files and header-only files", () => {
    expect(() => readCsvFile(tmpFile(""))).toThrow(EmptyData);
    expect(() => readCsvFile(tmpFile("x,y\n"))).toThrow(EmptyData);
  });
});

describe("checkHeader", () => {
  it("accepts the documented column set", () => {
    checkHeader([...RESULT_COLUMNS], RESULT_COLUMNS, "ok.csv");
  });

  it("rejects extra, missing, or reordered columns", () => {
    expect(() => checkHeader([...RESULT_COLUMNS, "extra"], RESULT_COLUMNS, "x"))
      .toThrow(SchemaError);
    expect(() => checkHeader(RESULT_COLUMNS.slice(1), RESULT_COLUMNS, "x"))
      .toThrow(SchemaError);
    const swapped = [...RESULT_COLUMNS];
    [swapped[0], swapped[1]] = [swapped[1], swapped[0]];
    expect(() => checkHeader(swapped, RESULT_COLUMNS, "x")).toThrow(SchemaError);
  });
});
