/** Wire types mirrored from the service's /v1/ API. */

export interface TurnResponse {
  reply: string;
  themes: string;
  action: string;
  state_digest: string;
  closed: boolean;
}

export interface SessionInfo {
  session_id: string;
  task: string;
  backend: string;
  seed: number;
  opening: TurnResponse | null;
  state_digest: string;
}

export type Speaker = "user" | "bot";

export interface Message {
  speaker: Speaker;
  text: string;
  timestamp: number;
  /** optimistic user bubble not yet confirmed by the service */
  pending?: boolean;
}

/** Raw predicate annotations for one bot turn, rendered in the side panel. */
export interface DebugBlock {
  themes: string;
  action: string;
}

export type Connection = "idle" | "connecting" | "ready" | "waiting" | "error" | "closed";

export interface ChatViewState {
  sessionId: string | null;
  task: string;
  backend: string;
  messages: Message[];
  /** always exactly one entry per bot message */
  debugBlocks: DebugBlock[];
  connection: Connection;
  error: string | null;
  /** text of the last send that failed, for the retry affordance */
  retryText: string | null;
  inputDisabled: boolean;
}
