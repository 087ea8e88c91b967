/** Trailing-edge debounce used for control changes (250 ms by default). */

export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  /** Drop any pending call. */
  cancel(): void;
  /** Run a pending call immediately. */
  flush(): void;
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs = 250,
): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | undefined;
  let pending: A | undefined;

  const wrapped = (...args: A): void => {
    pending = args;
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = undefined;
      const args0 = pending as A;
      pending = undefined;
      fn(...args0);
    }, waitMs);
  };

  wrapped.cancel = (): void => {
    if (timer !== undefined) clearTimeout(timer);
    timer = undefined;
    pending = undefined;
  };

  wrapped.flush = (): void => {
    if (timer === undefined) return;
    clearTimeout(timer);
    timer = undefined;
    const args0 = pending as A;
    pending = undefined;
    fn(...args0);
  };

  return wrapped;
}
