"""Reference scores for the six-point expected-error-reduction fixture.

Binary L2-regularised logistic regression trained by full-batch gradient
descent from zero (penalty l2/2 * |w|^2, bias unpenalised), then the
expected future zero-one loss over the remaining unlabeled points.
"""
import numpy as np

X = np.array([[-1.0, -0.5], [-0.4, 0.3], [0.1, -0.2], [0.3, 0.9], [0.8, -0.7], [1.2, 0.4]])
LABELED = {0: 0, 5: 1}
UNLABELED = [1, 2, 3, 4]


def fit(x, y, epochs, l2=0.01, step=0.1, tol=1e-6):
    xa = np.hstack([x, np.ones((len(x), 1))])
    theta = np.zeros(xa.shape[1])
    for _ in range(epochs):
        grad = xa.T @ (1.0 / (1.0 + np.exp(-xa @ theta)) - y) / len(y)
        grad[:-1] += l2 * theta[:-1]
        if np.linalg.norm(grad) < tol:
            break
        theta -= step * grad
    return theta


def proba(theta, x):
    p1 = 1.0 / (1.0 + np.exp(-(x @ theta[:-1] + theta[-1])))
    return np.array([1.0 - p1, p1])


ids = sorted(LABELED)
x0, y0 = X[ids], np.array([LABELED[i] for i in ids], dtype=float)
base = fit(x0, y0, 500)
scores = []
for c in UNLABELED:
    p = proba(base, X[c])
    expected = 0.0
    for label in (0, 1):
        theta = fit(np.vstack([x0, X[c]]), np.append(y0, label), 100)
        rest = [u for u in UNLABELED if u != c]
        expected += p[label] * sum(1.0 - proba(theta, X[u]).max() for u in rest)
    scores.append(-expected)
for c, s in zip(UNLABELED, scores):
    print(f"{c} {float(s)!r}")
print("choice", UNLABELED[int(np.argmax(scores))])
