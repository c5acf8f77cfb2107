// Canonical reference strings and their display forms.
//
//   PP-57-2021            regulation
//   PP-57-2021/bab-3      chapter   -> "PP-57-2021 BAB III"
//   PP-57-2021/12         article   -> "PP-57-2021 Pasal 12"
//   PP-57-2021/12/4       clause    -> "PP-57-2021 Pasal 12 ayat (4)"

export interface ParsedRef {
  regulationId: string;
  chapterNumber?: number;
  articleNumber?: number;
  clauseNumber?: number;
}

const ROMAN: Array<[number, string]> = [
  [40, "XL"], [10, "X"], [9, "IX"], [5, "V"], [4, "IV"], [1, "I"],
];

export function intToRoman(value: number): string {
  if (!Number.isInteger(value) || value <= 0) {
    throw new Error(`roman numerals are positive integers, got ${value}`);
  }
  let remaining = value;
  let out = "";
  for (const [amount, symbol] of ROMAN) {
    while (remaining >= amount) {
      out += symbol;
      remaining -= amount;
    }
  }
  return out;
}

function positiveInt(part: string): number {
  if (!/^\d+$/.test(part)) throw new Error(`bad ref component: ${part}`);
  const value = Number(part);
  if (value < 1) throw new Error(`ref numbers are positive: ${part}`);
  return value;
}

export function parseRef(ref: string): ParsedRef {
  const parts = ref.split("/");
  if (!parts[0]) throw new Error(`bad reference: ${ref}`);
  const parsed: ParsedRef = { regulationId: parts[0] };
  if (parts.length === 1) return parsed;
  if (parts.length === 2 && parts[1].startsWith("bab-")) {
    parsed.chapterNumber = positiveInt(parts[1].slice(4));
    return parsed;
  }
  if (parts.length === 2) {
    parsed.articleNumber = positiveInt(parts[1]);
    return parsed;
  }
  if (parts.length === 3) {
    parsed.articleNumber = positiveInt(parts[1]);
    parsed.clauseNumber = positiveInt(parts[2]);
    return parsed;
  }
  throw new Error(`bad reference: ${ref}`);
}

export function formatRef(ref: string): string {
  const parsed = parseRef(ref);
  if (parsed.chapterNumber !== undefined) {
    return `${parsed.regulationId} BAB ${intToRoman(parsed.chapterNumber)}`;
  }
  if (parsed.clauseNumber !== undefined) {
    return `${parsed.regulationId} Pasal ${parsed.articleNumber} ayat (${parsed.clauseNumber})`;
  }
  if (parsed.articleNumber !== undefined) {
    return `${parsed.regulationId} Pasal ${parsed.articleNumber}`;
  }
  return parsed.regulationId;
}

/** Canonical string of the enclosing article, or null for non-article refs. */
export function articleRef(ref: string): string | null {
  const parsed = parseRef(ref);
  if (parsed.articleNumber === undefined) return null;
  return `${parsed.regulationId}/${parsed.articleNumber}`;
}
