/** Trailing moving average; a unit step becomes a ramp of the window width. */
export function movingAverage(values: number[], windowSize: number): number[] {
  if (windowSize < 1 || !Number.isInteger(windowSize)) {
    throw new Error(`window size must be a positive integer, got ${windowSize}`);
  }
  const result: number[] = [];
  let sum = 0;
  for (let i = 0; i < values.length; i++) {
    sum += values[i];
    if (i >= windowSize) {
      sum -= values[i - windowSize];
    }
    result.push(sum / Math.min(i + 1, windowSize));
  }
  return result;
}
