/** Per-panel request bookkeeping.
 *
 *  Each panel keeps at most one analyze request in flight; starting a new
 *  one aborts its predecessor. Responses arriving out of order, or whose
 *  JSON/SVG config hashes disagree (user changed a control between the two
 *  fetches), are discarded rather than applied.
 */

import type { PortraitDocument } from "./api.js";

export interface PanelSnapshot {
  doc: PortraitDocument;
  docRaw: string;
  svg: string;
  hash: string;
  seq: number;
}

export interface RequestTicket {
  seq: number;
  signal: AbortSignal;
}

export class PanelState {
  private seq = 0;
  private appliedSeq = 0;
  private controller: AbortController | undefined;
  snapshot: PanelSnapshot | undefined;

  /** Start a new request generation, aborting whatever was in flight. */
  begin(): RequestTicket {
    this.controller?.abort();
    this.controller = new AbortController();
    this.seq += 1;
    return { seq: this.seq, signal: this.controller.signal };
  }

  /** True when a response for this ticket would still be current. */
  isCurrent(seq: number): boolean {
    return seq === this.seq && seq > this.appliedSeq;
  }

  /**
   * Apply a paired analyze + render response. Returns the stored snapshot,
   * or undefined when the response is stale or internally inconsistent.
   */
  accept(
    seq: number,
    doc: PortraitDocument,
    docRaw: string,
    docHash: string,
    svg: string,
    svgHash: string,
  ): PanelSnapshot | undefined {
    if (!this.isCurrent(seq)) return undefined;
    if (docHash !== svgHash) return undefined;
    if (doc.config_hash !== docHash) return undefined;
    this.appliedSeq = seq;
    this.snapshot = { doc, docRaw, svg, hash: docHash, seq };
    return this.snapshot;
  }

  /** Mark the current generation as failed so late twins are ignored too. */
  fail(seq: number): boolean {
    if (!this.isCurrent(seq)) return false;
    this.appliedSeq = seq;
    return true;
  }
}
