import { describe, expect, it } from "vitest";
import {
  AnnotationSet,
  SchemaError,
  serializeAnnotation,
  validateAnnotation,
} from "../src/schema.js";

function sample(): AnnotationSet {
  return {
    doc_id: "d1",
    tokens: [
      ["The", "the", "DT"],
      ["cat", "cat", "NN"],
      ["sat", "sit", "VBD"],
      [".", ".", "."],
    ],
    sentences: [[0, 4]],
    np: [[0, 2]],
    vp: [[2, 3]],
    adj: [],
    coref: [],
  };
}

describe("validateAnnotation", () => {
  it("accepts a well-formed record", () => {
    expect(() => validateAnnotation(sample())).not.toThrow();
  });

  it("rejects spans past the end of the document", () => {
    const a = sample();
    a.np = [[3, 9]];
    expect(() => validateAnnotation(a)).toThrow(SchemaError);
  });

  it("rejects empty spans", () => {
    const a = sample();
    a.vp = [[2, 2]];
    expect(() => validateAnnotation(a)).toThrow(SchemaError);
  });

  it("rejects coreference chains with fewer than two mentions", () => {
    const a = sample();
    a.coref = [[[0, 2]]];
    expect(() => validateAnnotation(a)).toThrow(SchemaError);
  });

  it("rejects empty document ids", () => {
    const a = sample();
    a.doc_id = "";
    expect(() => validateAnnotation(a)).toThrow(SchemaError);
  });
});

describe("serializeAnnotation", () => {
  it("emits keys in a stable order", () => {
    const line = serializeAnnotation(sample());
    const keys = Object.keys(JSON.parse(line));
    expect(keys).toEqual(["doc_id", "tokens", "sentences", "np", "vp", "adj", "coref"]);
  });

  it("round-trips through JSON", () => {
    const a = sample();
    expect(JSON.parse(serializeAnnotation(a))).toEqual(a);
  });
});
