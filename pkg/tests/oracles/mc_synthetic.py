"""Monte Carlo oracle for the synthetic end-to-end acceptance check.

Self-contained on purpose: no package imports. Simulates the separable
generator (per class: 10 informative descriptors at N(delta, 1) on the
class's own images plus 10 distractors at N(0, 1) everywhere, delta=0.8)
and estimates, from 10,000 independent samples each:

  * the population mean zero-shot AUC on a 100+100 test set, and
  * the population mean 20-shot AUC: 20+20 fresh training images,
    per-class-signed descriptor scores r, keep r >= 0, r-weighted class
    means, evaluated on a fresh 100+100 test set,

plus the mean kept-descriptor counts per class at n=20. The printed
values are frozen into tests/test_acceptance.py.

Run from the repository root:  python tests/oracles/mc_synthetic.py
"""

import numpy as np

PER_CLASS = 20
INFORMATIVE = 10
DELTA = 0.8
N_TEST = 100  # per class
N_SHOT = 20
SAMPLES = 10_000
SEED = 1234502


def gen_values(rng, n_pos, n_neg):
    """Rows: positives then negatives; cols: positive block then negative."""
    values = rng.normal(0.0, 1.0, (n_pos + n_neg, 2 * PER_CLASS))
    values[:n_pos, :INFORMATIVE] += DELTA
    values[n_pos:, PER_CLASS : PER_CLASS + INFORMATIVE] += DELTA
    return values


def auc_rank(pos_scores, neg_scores):
    """Mann-Whitney AUC via mid-ranks."""
    scores = np.concatenate((pos_scores, neg_scores))
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(scores.size)
    sorted_scores = scores[order]
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    p = pos_scores.size
    n = neg_scores.size
    return (ranks[:p].sum() - p * (p + 1) / 2.0) / (p * n)


def zero_shot_sample(rng):
    v = gen_values(rng, N_TEST, N_TEST)
    p = v[:, :PER_CLASS].mean(axis=1) - v[:, PER_CLASS:].mean(axis=1)
    return auc_rank(p[:N_TEST], p[N_TEST:])


def twenty_shot_sample(rng):
    train = gen_values(rng, N_SHOT, N_SHOT)
    labels = np.concatenate((np.ones(N_SHOT), -np.ones(N_SHOT)))
    col_class = np.concatenate((np.ones(PER_CLASS), -np.ones(PER_CLASS)))
    r = (train * labels[:, None]).mean(axis=0) * col_class
    kept = r >= 0.0
    for block in (slice(0, PER_CLASS), slice(PER_CLASS, 2 * PER_CLASS)):
        if not kept[block].any():
            idx = np.argmax(r[block]) + block.start
            kept[idx] = True

    test = gen_values(rng, N_TEST, N_TEST)

    def weighted(cols):
        use = np.flatnonzero(kept[cols]) + cols.start
        w = r[use]
        if w.sum() == 0.0:
            return test[:, use].mean(axis=1)
        return (test[:, use] * w).sum(axis=1) / w.sum()

    p = weighted(slice(0, PER_CLASS)) - weighted(slice(PER_CLASS, 2 * PER_CLASS))
    return (
        auc_rank(p[:N_TEST], p[N_TEST:]),
        int(kept[:PER_CLASS].sum()),
        int(kept[PER_CLASS:].sum()),
    )


def main():
    rng = np.random.default_rng(SEED)
    zero = np.array([zero_shot_sample(rng) for _ in range(SAMPLES)])
    rows = [twenty_shot_sample(rng) for _ in range(SAMPLES)]
    twenty = np.array([row[0] for row in rows])
    kept_pos = np.array([row[1] for row in rows])
    kept_neg = np.array([row[2] for row in rows])
    print(f"samples                 = {SAMPLES}")
    print(f"zero-shot mean AUC      = {zero.mean():.6f}  (sd {zero.std():.4f})")
    print(f"20-shot mean AUC        = {twenty.mean():.6f}  (sd {twenty.std():.4f})")
    print(f"mean kept positive @20  = {kept_pos.mean():.4f}")
    print(f"mean kept negative @20  = {kept_neg.mean():.4f}")


if __name__ == "__main__":
    main()
