/** Plain-language labels for everything the posteditor sees.
 *
 * Raw attribute and variable codes never reach the screen; anything
 * missing from the table falls back to a readable placeholder so new
 * lingware degrades gracefully instead of leaking codes.
 */

export interface AttributeOption {
  attr: string;
  label: string;
}

export interface AttributeGroup {
  cls: string;
  label: string;
  options: AttributeOption[];
}

/** Interlingual attribute classes offered in the attribute panel. */
export const ATTRIBUTE_GROUPS: AttributeGroup[] = [
  {
    cls: "number",
    label: "Number",
    options: [
      { attr: "sg", label: "singular" },
      { attr: "pl", label: "plural" },
    ],
  },
  {
    cls: "determination",
    label: "Determination",
    options: [
      { attr: "def", label: "definite (the)" },
      { attr: "indef", label: "indefinite (a)" },
    ],
  },
  {
    cls: "tense",
    label: "Tense",
    options: [
      { attr: "past", label: "past" },
      { attr: "present", label: "present" },
      { attr: "future", label: "future" },
    ],
  },
  {
    cls: "politeness",
    label: "Politeness",
    options: [
      { attr: "polite", label: "polite" },
      { attr: "fam", label: "familiar" },
    ],
  },
];

/** Style controls (generation variables, applied per word). */
export const STYLE_OPTIONS = [
  { name: "STYLE", value: "NOM", label: "prefer a noun phrasing" },
];

const ATTRIBUTE_LABELS: Record<string, string> = {};
for (const group of ATTRIBUTE_GROUPS) {
  for (const option of group.options) {
    ATTRIBUTE_LABELS[option.attr] = option.label;
  }
}
ATTRIBUTE_LABELS["entry"] = "sentence head";
ATTRIBUTE_LABELS["neg"] = "negated";

const RELATION_LABELS: Record<string, string> = {
  agt: "doer",
  obj: "thing affected",
  ben: "beneficiary",
  mod: "modifier",
  aoj: "described thing",
  tim: "time",
  plc: "place",
  gol: "goal",
  con: "condition",
  ins: "instrument",
  src: "source",
  entry: "sentence head",
};

const STAGE_LABELS: Record<string, string> = {
  umc: "final word tree",
  uma: "ordered sentence plan",
  gma: "abstract sentence plan",
  tree: "transferred tree",
  graph: "source graph",
};

export function attributeLabel(attr: string): string {
  return ATTRIBUTE_LABELS[attr] ?? `“${attr}”`;
}

export function relationLabel(rel: string): string {
  return RELATION_LABELS[rel] ?? `“${rel}” link`;
}

export function stageLabel(stage: string): string {
  return STAGE_LABELS[stage] ?? stage;
}

export function policyLabel(policy: string): string {
  switch (policy) {
    case "always":
      return "after every change";
    case "every-k":
      return "every few changes";
    case "on-demand":
      return "only when asked";
    default:
      return policy;
  }
}
