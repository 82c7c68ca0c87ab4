import { describe, expect, it } from "vitest";
import { basicNounPhrases, leavesWithPos, parseTree, TreeParseError } from "../src/tree.js";

const CAT = "(ROOT (S (NP (DT The) (NN cat)) (VP (VBD sat)) (. .)))";

describe("parseTree", () => {
  it("parses a simple sentence tree", () => {
    const tree = parseTree(CAT);
    expect(tree.label).toBe("ROOT");
    expect(tree.children).toHaveLength(1);
  });

  it("assigns sequential token indices to leaves", () => {
    const tree = parseTree(CAT);
    expect(leavesWithPos(tree, () => true)).toEqual([
      [0, 1],
      [1, 2],
      [2, 3],
      [3, 4],
    ]);
  });

  it("rejects unbalanced input", () => {
    expect(() => parseTree("(ROOT (NP (NN cat)")).toThrow(TreeParseError);
  });

  it("rejects empty input", () => {
    expect(() => parseTree("   ")).toThrow(TreeParseError);
  });

  it("rejects trailing garbage", () => {
    expect(() => parseTree(`${CAT} )`)).toThrow(TreeParseError);
  });
});

describe("basicNounPhrases", () => {
  it("finds the lowest noun phrase spans", () => {
    expect(basicNounPhrases(parseTree(CAT))).toEqual([[0, 2]]);
  });

  it("skips noun phrases that contain a nested noun phrase", () => {
    const nested =
      "(ROOT (S (NP (NP (DT the) (NN crew)) (PP (IN of) (NP (DT the) (NN module)))) (VP (VBZ waits))))";
    expect(basicNounPhrases(parseTree(nested))).toEqual([
      [0, 2],
      [3, 5],
    ]);
  });

  it("returns an empty list when no noun phrase exists", () => {
    expect(basicNounPhrases(parseTree("(ROOT (VP (VB run)))"))).toEqual([]);
  });
});

describe("leavesWithPos", () => {
  it("filters preterminals by tag predicate", () => {
    const tree = parseTree(CAT);
    expect(leavesWithPos(tree, (p) => p.startsWith("VB"))).toEqual([[2, 3]]);
    expect(leavesWithPos(tree, (p) => p.startsWith("JJ"))).toEqual([]);
  });
});
