/**
 * Exact (O(n^2)) t-SNE for small point sets, deterministic given a seed.
 * Perplexity calibration by per-point binary search on the Gaussian
 * bandwidth; gradient descent with momentum and early exaggeration.
 */

export interface TsneOptions {
  perplexity?: number;
  iterations?: number;
  learningRate?: number;
  seed?: number;
}

export function tsne(data: number[][], options: TsneOptions = {}): number[][] {
  const n = data.length;
  if (n < 2) throw new Error("t-SNE needs at least 2 points");
  const perplexity = Math.max(
    2,
    Math.min(options.perplexity ?? 15, Math.floor((n - 1) / 3))
  );
  const iterations = options.iterations ?? 400;
  const learningRate = options.learningRate ?? 100;
  const random = mulberry32(options.seed ?? 0);

  const p = jointProbabilities(data, perplexity);

  // deterministic small jitter init
  const y = new Float64Array(2 * n);
  for (let i = 0; i < 2 * n; i++) y[i] = 1e-4 * gaussian(random);
  const velocity = new Float64Array(2 * n);
  const gains = new Float64Array(2 * n).fill(1);
  const grad = new Float64Array(2 * n);
  const q = new Float64Array(n * n);

  for (let iter = 0; iter < iterations; iter++) {
    const exaggeration = iter < 100 ? 4 : 1;
    const momentum = iter < 100 ? 0.5 : 0.8;

    // student-t affinities in the embedding
    let qSum = 0;
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const dx = y[2 * i] - y[2 * j];
        const dy = y[2 * i + 1] - y[2 * j + 1];
        const w = 1 / (1 + dx * dx + dy * dy);
        q[i * n + j] = w;
        q[j * n + i] = w;
        qSum += 2 * w;
      }
    }

    grad.fill(0);
    for (let i = 0; i < n; i++) {
      for (let j = 0; j < n; j++) {
        if (i === j) continue;
        const w = q[i * n + j];
        const mult = (exaggeration * p[i * n + j] - w / qSum) * w;
        grad[2 * i] += 4 * mult * (y[2 * i] - y[2 * j]);
        grad[2 * i + 1] += 4 * mult * (y[2 * i + 1] - y[2 * j + 1]);
      }
    }

    for (let k = 0; k < 2 * n; k++) {
      gains[k] =
        Math.sign(grad[k]) !== Math.sign(velocity[k])
          ? gains[k] + 0.2
          : Math.max(0.01, gains[k] * 0.8);
      velocity[k] = momentum * velocity[k] - learningRate * gains[k] * grad[k];
      y[k] += velocity[k];
    }

    // re-center to keep the embedding bounded
    let mx = 0;
    let my = 0;
    for (let i = 0; i < n; i++) {
      mx += y[2 * i];
      my += y[2 * i + 1];
    }
    mx /= n;
    my /= n;
    for (let i = 0; i < n; i++) {
      y[2 * i] -= mx;
      y[2 * i + 1] -= my;
    }
  }

  const out: number[][] = [];
  for (let i = 0; i < n; i++) out.push([y[2 * i], y[2 * i + 1]]);
  return out;
}

function jointProbabilities(data: number[][], perplexity: number): Float64Array {
  const n = data.length;
  const d2 = new Float64Array(n * n);
  for (let i = 0; i < n; i++) {
    for (let j = i + 1; j < n; j++) {
      let dist = 0;
      const a = data[i];
      const b = data[j];
      for (let k = 0; k < a.length; k++) {
        const diff = a[k] - b[k];
        dist += diff * diff;
      }
      d2[i * n + j] = dist;
      d2[j * n + i] = dist;
    }
  }

  const target = Math.log(perplexity);
  const p = new Float64Array(n * n);
  const row = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    let betaMin = -Infinity;
    let betaMax = Infinity;
    let beta = 1;
    for (let attempt = 0; attempt < 64; attempt++) {
      let sum = 0;
      for (let j = 0; j < n; j++) {
        row[j] = i === j ? 0 : Math.exp(-d2[i * n + j] * beta);
        sum += row[j];
      }
      if (sum === 0) {
        beta /= 2;
        continue;
      }
      let entropy = 0;
      for (let j = 0; j < n; j++) {
        if (row[j] > 0) {
          const pj = row[j] / sum;
          entropy -= pj * Math.log(pj);
        }
      }
      const diff = entropy - target;
      if (Math.abs(diff) < 1e-5) break;
      if (diff > 0) {
        betaMin = beta;
        beta = betaMax === Infinity ? beta * 2 : (beta + betaMax) / 2;
      } else {
        betaMax = beta;
        beta = betaMin === -Infinity ? beta / 2 : (beta + betaMin) / 2;
      }
    }
    let sum = 0;
    for (let j = 0; j < n; j++) sum += row[j];
    for (let j = 0; j < n; j++) p[i * n + j] = sum > 0 ? row[j] / sum : 0;
  }

  // symmetrize and normalize
  const joint = new Float64Array(n * n);
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      joint[i * n + j] = Math.max((p[i * n + j] + p[j * n + i]) / (2 * n), 1e-12);
    }
  }
  return joint;
}

function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function gaussian(random: () => number): number {
  const u = Math.max(random(), 1e-12);
  const v = random();
  return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
}
