/**
 * Constituency-tree handling: parse the S-expression strings returned by the
 * annotation server and pull out phrase spans over the sentence's tokens.
 */

export interface TreeNode {
  label: string;
  children: TreeNode[];
  /** leaf token index within the sentence, -1 for internal nodes */
  tokenIndex: number;
}

export class TreeParseError extends Error {}

/** Parse one bracketed tree, e.g. "(ROOT (S (NP (DT The) (NN cat)) ...))". */
export function parseTree(text: string): TreeNode {
  const tokens = text.match(/\(|\)|[^\s()]+/g) ?? [];
  let pos = 0;
  let leafCounter = 0;

  function parseNode(): TreeNode {
    if (tokens[pos] !== "(") {
      throw new TreeParseError(`expected '(' at item ${pos}`);
    }
    pos++;
    const label = tokens[pos++];
    if (label === undefined || label === "(" || label === ")") {
      throw new TreeParseError("missing node label");
    }
    const node: TreeNode = { label, children: [], tokenIndex: -1 };
    while (tokens[pos] !== ")") {
      if (pos >= tokens.length) {
        throw new TreeParseError("unbalanced tree");
      }
      if (tokens[pos] === "(") {
        node.children.push(parseNode());
      } else {
        // preterminal: the word is a bare leaf under its POS label
        node.children.push({
          label: tokens[pos++],
          children: [],
          tokenIndex: leafCounter++,
        });
      }
    }
    pos++;
    return node;
  }

  const root = parseNode();
  if (pos !== tokens.length) {
    throw new TreeParseError("trailing content after tree");
  }
  return root;
}

function leafRange(node: TreeNode): [number, number] | null {
  let lo = Infinity;
  let hi = -Infinity;
  const walk = (n: TreeNode): void => {
    if (n.tokenIndex >= 0) {
      lo = Math.min(lo, n.tokenIndex);
      hi = Math.max(hi, n.tokenIndex + 1);
    }
    n.children.forEach(walk);
  };
  walk(node);
  return lo === Infinity ? null : [lo, hi];
}

function collect(node: TreeNode, out: TreeNode[], label: string): void {
  if (node.label === label) out.push(node);
  for (const child of node.children) collect(child, out, label);
}

function containsLabelBelow(node: TreeNode, label: string): boolean {
  return node.children.some(
    (c) => c.label === label || containsLabelBelow(c, label),
  );
}

/**
 * Basic noun phrases: NP nodes with no NP nested underneath, as sentence-local
 * [start, end) token spans.
 */
export function basicNounPhrases(root: TreeNode): [number, number][] {
  const nps: TreeNode[] = [];
  collect(root, nps, "NP");
  const spans: [number, number][] = [];
  for (const np of nps) {
    if (containsLabelBelow(np, "NP")) continue;
    const range = leafRange(np);
    if (range) spans.push(range);
  }
  return spans.sort((a, b) => a[0] - b[0]);
}

/** Single-token spans for leaves whose preterminal matches a label test. */
export function leavesWithPos(
  root: TreeNode,
  test: (pos: string) => boolean,
): [number, number][] {
  const spans: [number, number][] = [];
  const walk = (node: TreeNode): void => {
    const leaf = node.children.find((c) => c.tokenIndex >= 0);
    if (leaf && node.children.length === 1 && test(node.label)) {
      spans.push([leaf.tokenIndex, leaf.tokenIndex + 1]);
    }
    node.children.forEach(walk);
  };
  walk(root);
  return spans.sort((a, b) => a[0] - b[0]);
}
