import { describe, expect, it } from "vitest";

import { EmptyDataError, SchemaError, parseCsv, requireNumeric } from "../src/schema.js";

describe("versioned CSV parsing", () => {
  it("parses a tagged file", () => {
    const table = parseCsv("# contmech-v1\na,b\n1,2\n3,4\n");
    expect(table.header).toEqual(["a", "b"]);
    expect(table.rows).toEqual([
      ["1", "2"],
      ["3", "4"],
    ]);
  });

  it("rejects a missing or wrong schema tag", () => {
    expect(() => parseCsv("a,b\n1,2\n")).toThrow(SchemaError);
    expect(() => parseCsv("# contmech-v2\na,b\n1,2\n")).toThrow(SchemaError);
    expect(() => parseCsv("")).toThrow(SchemaError);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("# contmech-v1\na,b\n1\n")).toThrow(SchemaError);
  });

  it("ignores trailing blank lines", () => {
    const table = parseCsv("# contmech-v1\na\n1\n\n\n");
    expect(table.rows).toEqual([["1"]]);
  });

  it("requires numeric columns to be numeric", () => {
    const table = parseCsv("# contmech-v1\na\nnope\n");
    expect(() => requireNumeric(table, "a")).toThrow(SchemaError);
    expect(() => requireNumeric(table, "missing")).toThrow(SchemaError);
  });
});
