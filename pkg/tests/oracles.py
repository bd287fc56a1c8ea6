"""Independent reference implementations used only by the tests."""

import numpy as np


def nb_posteriors(X_train, y_train, X_test, kind, alpha=1.0, threshold=0.0):
    """Brute-force naive Bayes: explicit per-class products, probability space.

    Returns an ``(n_test, 2)`` array of unnormalized class posteriors
    ``P(c) * prod_j P(x_j | c)``, computed with plain loops.
    """
    X_train = [list(map(float, row)) for row in X_train]
    X_test = [list(map(float, row)) for row in X_test]
    y_train = [int(v) for v in y_train]
    d = len(X_train[0])
    n = len(y_train)
    out = []
    params = {}
    for c in (0, 1):
        rows = [r for r, yy in zip(X_train, y_train) if yy == c]
        prior = len(rows) / n
        if kind == "multinomial_nb":
            totals = [sum(r[j] for r in rows) + alpha for j in range(d)]
            z = sum(totals)
            params[c] = (prior, [t / z for t in totals])
        else:
            present = [sum(1 for r in rows if r[j] > threshold) for j in range(d)]
            params[c] = (prior, [(p + alpha) / (len(rows) + 2 * alpha) for p in present])
    for x in X_test:
        post = []
        for c in (0, 1):
            prior, theta = params[c]
            p = prior
            for j in range(d):
                if kind == "multinomial_nb":
                    p *= theta[j] ** x[j]
                else:
                    p *= theta[j] if x[j] > threshold else 1.0 - theta[j]
            post.append(p)
        out.append(post)
    return np.array(out)


def nb_predict(X_train, y_train, X_test, kind, alpha=1.0, threshold=0.0, rel_tie=1e-9):
    """Argmax of :func:`nb_posteriors`; (near-)ties go to the majority training class."""
    post = nb_posteriors(X_train, y_train, X_test, kind, alpha, threshold)
    y_train = np.asarray(y_train)
    majority = int(y_train.sum() >= len(y_train) - y_train.sum())
    pred = []
    for p0, p1 in post:
        if abs(p1 - p0) <= rel_tie * max(p0, p1):
            pred.append(majority)
        else:
            pred.append(int(p1 > p0))
    return np.array(pred), post


def random_nb_problem(rng, kind):
    n = int(rng.integers(2, 13))
    d = int(rng.integers(1, 9))
    y = rng.integers(0, 2, n)
    y[0], y[1] = 0, 1
    rng.shuffle(y)
    if kind == "multinomial_nb" and rng.random() < 0.5:
        X = rng.random((n, d)) * (rng.random((n, d)) < 0.6)
    else:
        X = rng.integers(0, 3, (n, d)).astype(float)
    return X, y


def central_difference(f, x, h=1e-6):
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def rel_error(a, b, floor=1e-4):
    """Largest elementwise |a - b| / (|a| + |b|); the floor keeps exact zeros
    from turning finite-difference round-off (~1e-10) into a large ratio."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.maximum(floor, np.abs(a) + np.abs(b))))

