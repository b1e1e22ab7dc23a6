"""Extended-precision reference values frozen into the Rust tests.

Every quantity here is computed straight from the closed-form definitions with
mpmath at 50 digits; nothing is shared with the Rust implementation.
Run: python3 mpmath_oracles.py
"""
from mpmath import mp, mpf, exp, log, sqrt, matrix, lu_solve, polyroots, nprod, inf

mp.dps = 50


def qpoch(q, k):
    r = mpf(1)
    for j in range(1, k + 1):
        r *= 1 - q**j
    return r


def f_coeffs(a, n):
    m = n - 1
    out = []
    fact = mpf(1)
    for k in range(1, m + 1):
        fact *= m - k + 1
        out.append(fact * a ** (mpf(k * (k - 1)) / 2) * (1 - a) ** k / qpoch(a, k))
    return out


def f_eval(a, n, x):
    beta = a / (1 - a)
    m = n - 1
    L = log(x)
    s = L**m
    for k, c in enumerate(f_coeffs(a, n), start=1):
        s += c * L ** (m - k)
    return x**beta * s


def g_terms(a, n, K=80):
    m = n - 1
    t = [(mpf(1), mpf(0))]
    for k in range(2, K):
        c = (-1) ** (k - 1) * a ** (mpf((k - 1) * (k - 2 - 2 * m)) / 2) / qpoch(a, k - 1)
        mu = (1 - a ** (k - 1)) / ((1 - a) * a ** (k - 1))
        t.append((c, mu))
    return t


def g_eval(a, n, x):
    return sum(c * x**mu for c, mu in g_terms(a, n))


def gram_distance(inner, rhs, wnorm2, N):
    G = matrix(N, N)
    b = matrix(N, 1)
    for i in range(N):
        b[i] = rhs(i)
        for j in range(N):
            G[i, j] = inner(i, j)
    c = lu_solve(G, b)
    d2 = wnorm2 - sum(b[i] * c[i] for i in range(N))
    return sqrt(d2)


def f_family_distance_to_one(a, N):
    # f_n = x^beta * sum_j F[n][j] ln^j x ; use exact moments of x^p ln^k x
    beta = a / (1 - a)
    polys = []
    for n in range(1, N + 1):
        m = n - 1
        p = [mpf(0)] * (m + 1)
        p[m] = mpf(1)
        for k, c in enumerate(f_coeffs(a, n), start=1):
            p[m - k] = c
        polys.append(p)

    def mom(p, k):  # int_0^1 x^p ln^k x dx
        from mpmath import factorial
        return (-1) ** k * factorial(k) / (p + 1) ** (k + 1)

    def inner(i, j):
        return sum(pi * pj * mom(2 * beta, a1 + a2) for a1, pi in enumerate(polys[i]) for a2, pj in enumerate(polys[j]))

    def rhs(i):
        return sum(pi * mom(beta, a1) for a1, pi in enumerate(polys[i]))

    return [gram_distance(inner, rhs, mpf(1), n) for n in range(1, N + 1)]


def g_family_distance_to_one(a, N):
    terms = [g_terms(a, n, K=40) for n in range(1, N + 1)]

    def inner(i, j):
        return sum(c1 * c2 / (m1 + m2 + 1) for c1, m1 in terms[i] for c2, m2 in terms[j])

    def rhs(i):
        return sum(c / (m + 1) for c, m in terms[i])

    return [gram_distance(inner, rhs, mpf(1), n) for n in range(1, N + 1)]


def muntz_power_floor(a, p, K=200):
    # distance of x^p from the closed span of {x^mu_k : k >= 0}
    r = 1 / sqrt(2 * p + 1)
    for k in range(K):
        mu = (1 - a**k) / ((1 - a) * a**k)
        r *= abs(p - mu) / (p + mu + 1)
    return r


def pn_roots(q, n):
    from mpmath import factorial
    coeffs = [mpf(1)]
    for k in range(1, n + 1):
        den = mpf(1)
        for j in range(1, k + 1):
            den *= q**j - 1
        coeffs.append(factorial(n) / factorial(n - k) * q ** (mpf(k * (k + 1)) / 2) / den)
    return sorted(r.real for r in polyroots(list(reversed(coeffs)), maxsteps=200, extraprec=200))


def show(name, v):
    print(f"{name} = {mp.nstr(v, 20)}")


if __name__ == "__main__":
    show("F_0.5(1)", nprod(lambda k: 1 - mpf(0.5) ** k, [1, inf]))
    show("F_0.3(-2.5)", nprod(lambda k: 1 - mpf(0.3) ** k * mpf(-2.5), [1, inf]))
    show("F_-0.6(3.7)", nprod(lambda k: 1 - mpf(-0.6) ** k * mpf(3.7), [1, inf]))
    show("F_0.9(10)", nprod(lambda k: 1 - mpf(0.9) ** k * 10, [1, inf]))
    show("g1(a=0.5,x=0.5)", g_eval(mpf(0.5), 1, mpf(0.5)))
    show("g3(a=0.25,x=0.3)", g_eval(mpf(0.25), 3, mpf(0.3)))
    show("g4(a=0.5,x=0.7)", g_eval(mpf(0.5), 4, mpf(0.7)))
    show("g7(a=0.25,x=0.6)", g_eval(mpf(0.25), 7, mpf(0.6)))
    show("f4(a=0.25,x=0.2)", f_eval(mpf(0.25), 4, mpf(0.2)))
    show("f10(a=0.75,x=0.05)", f_eval(mpf(0.75), 10, mpf(0.05)))
    for a in ["0.25", "0.5", "0.75"]:
        print(f"dist(1, f_1..f_N), alpha={a}:", [mp.nstr(d, 12) for d in f_family_distance_to_one(mpf(a), 12)])
    print("dist(1, g_1..g_N), alpha=0.5:", [mp.nstr(d, 12) for d in g_family_distance_to_one(mpf("0.5"), 8)])
    show("muntz floor x^1 alpha=0.5", muntz_power_floor(mpf("0.5"), 1))
    show("muntz floor x^1 alpha=0.25", muntz_power_floor(mpf("0.25"), 1))
    print("P_5 roots q=0.5:", [mp.nstr(r, 18) for r in pn_roots(mpf("0.5"), 5)])
    print("P_3 roots q=0.25:", [mp.nstr(r, 18) for r in pn_roots(mpf("0.25"), 3)])
    a = mpf("0.5")
    print("f_4 zeros alpha=0.5:", [mp.nstr(exp(-(1 - a) / (a * z)), 18) for z in pn_roots(a, 3)])
    a = mpf("0.25")
    print("f_4 zeros alpha=0.25:", [mp.nstr(exp(-(1 - a) / (a * z)), 18) for z in pn_roots(a, 3)])
