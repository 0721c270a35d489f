export type View = "landing" | "loading" | "results";

export interface ViewState {
  sessionId: string | null;
  view: View;
  selectedClass: number | null;
  query: string;
  page: number;
  alerts: string[];
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    view: "landing",
    selectedClass: null,
    query: "",
    page: 1,
    alerts: [],
  };
}
