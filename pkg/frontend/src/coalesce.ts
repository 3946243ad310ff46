// Latest-response-wins guard for overlapping async requests: only the most
// recently dispatched request may apply its callback, so a slow stale
// response can never clobber fresh state.

export interface Coalescer<T> {
  dispatch(pending: Promise<T>, apply: (value: T) => void, reject?: (err: unknown) => void): void;
  invalidate(): void;
}

export function makeCoalescer<T>(): Coalescer<T> {
  let lastId = 0;
  return {
    dispatch(pending, apply, reject) {
      lastId++;
      const thisId = lastId;
      pending.then(
        (value) => {
          if (thisId === lastId) apply(value);
        },
        (err) => {
          if (thisId === lastId && reject) reject(err);
        },
      );
    },
    invalidate() {
      lastId++;
    },
  };
}
