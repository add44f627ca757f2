/** Parse enforce-pair clause text back into structured corrections.
 *
 * Clauses come from the core's reviser and follow three shapes:
 *   counts    — "2 dog"
 *   colors    — "The second dog is brown" / "The second dog is not brown"
 *   relations — "The first bench is on the left of the first boat"
 *               (optionally negated with "is not")
 */

import type { RelationKind } from "./formats.js";
import { PALETTE, type PaletteColor } from "./palette.js";

const ORDINALS = ["first", "second", "third", "fourth", "fifth"] as const;

export interface CountClause {
  type: "count";
  category: string;
  n: number;
}

export interface ColorClause {
  type: "color";
  category: string;
  index: number;
  color: PaletteColor;
  negated: boolean;
}

export interface RelationClause {
  type: "relation";
  subject: { category: string; index: number };
  object: { category: string; index: number };
  kind: RelationKind;
  negated: boolean;
}

export type Clause = CountClause | ColorClause | RelationClause;

const RELATION_PHRASES: Array<[string, RelationKind]> = [
  ["on the left of", "left"],
  ["on the right of", "right"],
  ["above", "above"],
  ["below", "below"],
];

function parseOrdinal(word: string): number {
  const index = (ORDINALS as readonly string[]).indexOf(word);
  if (index < 0) throw new Error(`unknown ordinal: ${word}`);
  return index;
}

function parseClause(text: string): Clause {
  const countMatch = /^(\d+) (.+)$/.exec(text);
  if (countMatch) {
    return { type: "count", category: countMatch[2]!, n: Number(countMatch[1]) };
  }
  const subjectMatch = /^The (\w+) (.+?) is (not )?(.+)$/.exec(text);
  if (!subjectMatch) throw new Error(`unparseable clause: ${JSON.stringify(text)}`);
  const subject = { category: subjectMatch[2]!, index: parseOrdinal(subjectMatch[1]!) };
  const negated = subjectMatch[3] !== undefined;
  const rest = subjectMatch[4]!;
  for (const [phrase, kind] of RELATION_PHRASES) {
    if (rest.startsWith(phrase + " the ")) {
      const tail = rest.slice(phrase.length + " the ".length);
      const objectMatch = /^(\w+) (.+)$/.exec(tail);
      if (!objectMatch) throw new Error(`unparseable relation object: ${JSON.stringify(text)}`);
      return {
        type: "relation",
        subject,
        object: { category: objectMatch[2]!, index: parseOrdinal(objectMatch[1]!) },
        kind,
        negated,
      };
    }
  }
  if ((PALETTE as readonly string[]).includes(rest)) {
    return { type: "color", ...subject, color: rest as PaletteColor, negated };
  }
  throw new Error(`unparseable clause: ${JSON.stringify(text)}`);
}

export function parseClauses(text: string): Clause[] {
  if (!text.trim()) return [];
  return text.split(". ").map((part) => parseClause(part.trim()));
}
