/** Display names for the 19 sustainability classes (mirrors the server's
 * default schema; the API itself only speaks class ids). */
export const CLASS_NAMES: Record<number, string> = {
  0: "wages & hours",
  1: "child labor",
  2: "forced labor",
  3: "freedom of association",
  4: "workplace safety",
  5: "discrimination",
  6: "gender equality",
  7: "migrant workers",
  8: "social audits",
  9: "community impact",
  10: "grievance mechanisms",
  11: "carbon emissions",
  12: "water pollution",
  13: "chemical use",
  14: "waste & recycling",
  15: "microplastics",
  16: "biodiversity",
  17: "energy use",
  18: "deforestation",
};

export function classLabel(classId: number): string {
  return CLASS_NAMES[classId] ?? `class ${classId}`;
}
