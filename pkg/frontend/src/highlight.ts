/** Renders passage text with server-supplied match spans as <mark> elements.
 *
 * The UI trusts the server's offsets and performs no matching of its own;
 * spans that are out of bounds, inverted, or overlapping the previous one
 * are discarded with a console warning rather than crashing the view. */
export function renderHighlighted(text: string, spans: [number, number][]): DocumentFragment {
  const fragment = document.createDocumentFragment();
  let cursor = 0;
  for (const span of spans) {
    const start = span?.[0];
    const end = span?.[1];
    if (
      !Number.isInteger(start) ||
      !Number.isInteger(end) ||
      start! < cursor ||
      end! <= start! ||
      end! > text.length
    ) {
      console.warn("discarding invalid match span", span, "for text of length", text.length);
      continue;
    }
    if (start! > cursor) {
      fragment.append(document.createTextNode(text.slice(cursor, start!)));
    }
    const mark = document.createElement("mark");
    mark.className = "match-highlight";
    mark.textContent = text.slice(start!, end!);
    fragment.append(mark);
    cursor = end!;
  }
  if (cursor < text.length) {
    fragment.append(document.createTextNode(text.slice(cursor)));
  }
  return fragment;
}
