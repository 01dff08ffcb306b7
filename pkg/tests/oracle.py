"""Independent dense-matrix reference for the interference models.

Pure Python lists of complex numbers, no numpy and no package imports, so a
shared bug cannot hide in both sides of a comparison.
"""

from __future__ import annotations

import cmath
import math


def zeros(n, m=None):
    return [[0j] * (n if m is None else m) for _ in range(n)]


def eye(n):
    out = zeros(n)
    for i in range(n):
        out[i][i] = 1 + 0j
    return out


def diag(entries):
    out = zeros(len(entries))
    for i, e in enumerate(entries):
        out[i][i] = complex(e)
    return out


def matmul(a, b):
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def matvec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def kron(a, b):
    """Matrix Kronecker product, first factor major."""
    out = []
    for ra in a:
        for rb in b:
            out.append([x * y for x in ra for y in rb])
    return out


def kron_vec(u, v):
    return [x * y for x in u for y in v]


def norm2(v):
    return sum(abs(x) ** 2 for x in v)


def born(p, psi):
    return norm2(matvec(p, psi))


def cond(x, y, psi):
    """Lüders: ||x y psi||^2 / ||y psi||^2."""
    after = matvec(y, psi)
    return norm2(matvec(x, after)) / norm2(after)


def block_diag(*blocks):
    n = sum(len(b) for b in blocks)
    out = zeros(n)
    k = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[k + i][k + j] = complex(x)
        k += len(b)
    return out


def d6(alpha1):
    ca, sa = math.cos(math.pi * alpha1), math.sin(math.pi * alpha1)
    return block_diag(
        [[0.5, 0.5j], [-0.5j, 0.5]],
        [[0.5, -0.5j], [0.5j, 0.5]],
        [[ca * ca, ca * sa], [ca * sa, sa * sa]],
    )


def d2(alpha2):
    c, s = math.cos(math.pi * alpha2), math.sin(math.pi * alpha2)
    return [[c * c + 0j, c * s], [c * s, s * s]]


def a1_roots(a3, a4, a5):
    b = a3 + a4 + a5 - 1
    c = a3 * (a4 + a5)
    disc = math.sqrt(b * b - 4 * c)
    return (-b - disc) / 2, (-b + disc) / 2


def psi6(r, theta, a1, a3, a4, a5):
    return [
        math.sqrt(a1 * r) + 0j,
        cmath.exp(1j * math.pi * theta) * math.sqrt(a1 * (1 - r)),
        math.sqrt(a3) + 0j,
        -1j * math.sqrt(a4),
        -math.sqrt(a5) + 0j,
        math.sqrt(1 - a1 - a3 - a4 - a5) + 0j,
    ]


def two_cause(r, theta, a1, a3, a4, a5, alpha1):
    A = diag([1, 1, 1, 0, 0, 0])
    B = diag([1, 1, 0, 1, 1, 0])
    return {"A": A, "B": B, "C": None, "D": d6(alpha1), "psi": psi6(r, theta, a1, a3, a4, a5)}


def three_cause(r, theta, a1, a3, a4, a5, alpha1, r2, theta2, alpha2):
    A = diag([1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0])
    B = diag([1, 1, 1, 1, 0, 0, 1, 1, 1, 1, 0, 0])
    C = diag([1, 0] * 6)
    psi = kron_vec(psi6(r, theta, a1, a3, a4, a5), [math.sqrt(r2) + 0j, cmath.exp(1j * math.pi * theta2) * math.sqrt(1 - r2)])
    return {"A": A, "B": B, "C": C, "D": kron(d6(alpha1), d2(alpha2)), "psi": psi}


def report(model):
    A, B, C, D, psi = model["A"], model["B"], model["C"], model["D"], model["psi"]
    n = len(psi)
    joint = matmul(A, B) if C is None else matmul(matmul(A, B), C)
    not_d = sub(eye(n), D)
    not_a = sub(eye(n), A)
    p_d = born(D, psi)
    p_a = born(A, psi)
    return {
        "p_d": p_d,
        "p_d_given_a": cond(D, A, psi),
        "p_d_given_b": cond(D, B, psi),
        "p_d_given_c": None if C is None else cond(D, C, psi),
        "p_d_given_joint": cond(D, joint, psi),
        "p_joint_given_d": cond(joint, D, psi),
        "p_joint_given_not_d": cond(joint, not_d, psi),
        "p_a": p_a,
        "p_b": born(B, psi),
        "p_c": None if C is None else born(C, psi),
        "p_joint": born(joint, psi),
        "interference_a": p_d - (cond(D, A, psi) * p_a + cond(D, not_a, psi) * (1 - p_a)),
    }
