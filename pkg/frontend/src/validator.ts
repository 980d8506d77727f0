import { TimelineDocument, ValidationReport } from "./types.js";

export type ValidatePost = (doc: TimelineDocument) => Promise<ValidationReport>;

export interface ValidatorEvents {
  onReport?: (report: ValidationReport, seq: number) => void;
  onError?: (error: unknown, seq: number) => void;
  /** Fired when an edit is queued, before the debounce window elapses. */
  onPending?: () => void;
}

/**
 * Turns a stream of board edits into validation requests.
 *
 * Edits are debounced: each call to `schedule` restarts the wait, so a
 * burst of changes produces a single request once the board has been quiet
 * for `delayMs`. Every request carries a monotonically increasing sequence
 * number and a response is applied only if it is newer than the newest
 * outcome already applied, so a slow answer to an old edit can never
 * overwrite feedback for a newer one.
 */
export class DebouncedValidator {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private pendingDoc: TimelineDocument | null = null;
  private nextSeq = 0;
  private appliedSeq = 0;
  private _lastReport: ValidationReport | null = null;

  constructor(
    private readonly post: ValidatePost,
    private readonly events: ValidatorEvents = {},
    private readonly delayMs = 300,
  ) {}

  /** The newest report ever applied, or null before the first response. */
  get lastReport(): ValidationReport | null {
    return this._lastReport;
  }

  /** Queue `doc` for validation, restarting the debounce window. */
  schedule(doc: TimelineDocument): void {
    this.pendingDoc = doc;
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.events.onPending?.();
    this.timer = setTimeout(() => {
      this.timer = null;
      this.fire();
    }, this.delayMs);
  }

  /** Validate the queued document immediately, skipping the wait. */
  flush(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.fire();
  }

  /** Cancel pending work; responses still in flight are never applied. */
  dispose(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.pendingDoc = null;
    this.appliedSeq = Number.MAX_SAFE_INTEGER;
  }

  private fire(): void {
    if (this.pendingDoc === null) {
      return;
    }
    const doc = this.pendingDoc;
    this.pendingDoc = null;
    const seq = ++this.nextSeq;
    this.post(doc).then(
      (report) => {
        if (seq <= this.appliedSeq) {
          return;
        }
        this.appliedSeq = seq;
        this._lastReport = report;
        this.events.onReport?.(report, seq);
      },
      (error) => {
        // a stale failure is as irrelevant as a stale success
        if (seq <= this.appliedSeq) {
          return;
        }
        this.appliedSeq = seq;
        this.events.onError?.(error, seq);
      },
    );
  }
}
