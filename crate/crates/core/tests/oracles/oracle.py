"""High-precision reference values frozen into the Rust test suite.

Everything here is computed with mpmath at 40 digits using direct term sums,
continuous integrals over the nuisance prior and bracketing root finding.
None of it shares code with the Rust implementation.
"""
from mpmath import mp, mpf, exp, log, factorial, quad, findroot, sqrt, pi, inf, gammainc, gamma

mp.dps = 40


def pmf(n, nu):
    return nu**n * exp(-nu) / factorial(n)


def cdf(n, nu):
    return sum(pmf(k, nu) for k in range(n + 1))


def bisect(f, lo, hi, it=200):
    flo = f(lo)
    for _ in range(it):
        mid = (lo + hi) / 2
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def phi(x):
    return exp(-x * x / 2) / sqrt(2 * pi)


print("log_poisson_pmf(3,1.5) =", mp.nstr(log(pmf(3, mpf("1.5"))), 20))
print("poisson_cdf(3,1.5)     =", mp.nstr(cdf(3, mpf("1.5")), 20))
print("Q(4,1.5)               =", mp.nstr(gammainc(4, mpf("1.5")) / gamma(4), 20))

# exact CLs, s=1 b=1.5 N=3
s, b, N = mpf(1), mpf("1.5"), 3
cls = lambda mu: cdf(N, mu * s + b) / cdf(N, b)
print("cls(6.356)             =", mp.nstr(cls(mpf("6.356")), 20))
print("cls limit a=0.05       =", mp.nstr(bisect(lambda m: cls(m) - mpf("0.05"), mpf(0), mpf(50)), 20))

# bayes closed form s=1 b=5 N=1 alpha=0.1, via posterior integral
s2, b2, N2 = mpf(1), mpf(5), 1
norm = quad(lambda m: pmf(N2, m * s2 + b2), [0, inf])
post = lambda u: quad(lambda m: pmf(N2, m * s2 + b2), [0, u]) / norm
print("bayes s1 b5 N1 a0.1    =", mp.nstr(bisect(lambda u: (1 - post(u)) - mpf("0.1"), mpf(0), mpf(50), 120), 20))

# posterior density at 0
normp = quad(lambda m: pmf(3, m + mpf("1.5")), [0, inf])
print("p(0) s1 b1.5 N3        =", mp.nstr(pmf(3, mpf("1.5")) / normp, 20))

# 2-node probabilists GH: nodes +-1, weights 1/2
k = mpf("1.2")
bs = [mpf("1.5") * k, mpf("1.5") / k]
print("L_m(mu=0,n=3) 2-node   =", mp.nstr(sum(pmf(3, x) for x in bs) / 2, 20))
print("L_m(mu=1,n=2) 2-node   =", mp.nstr(sum(pmf(2, 1 + x) for x in bs) / 2, 20))
k = mpf("1.3")
bs = [mpf("1.5") * k, mpf("1.5") / k]
num = sum(cdf(3, 2 + x) for x in bs)
den = sum(cdf(3, x) for x in bs)
print("hybrid_cls 2-node      =", mp.nstr(num / den, 20))

# continuous-integral hybrid CLs / marginal Bayes with lognormal signal response
def sig_limits(kappa, b, N, alpha):
    def clsr(mu):
        a = quad(lambda e: phi(e) * cdf(N, mu * kappa**e + b), [-14, -4, 0, 4, 14])
        c = cdf(N, b)
        return a / c
    def bayr(mu):
        a = quad(lambda e: phi(e) * (gammainc(N + 1, mu * kappa**e + b) / gamma(N + 1)) / kappa**e, [-14, -4, 0, 4, 14])
        c = quad(lambda e: phi(e) * (gammainc(N + 1, b) / gamma(N + 1)) / kappa**e, [-14, -4, 0, 4, 14])
        return a / c
    mc = bisect(lambda m: clsr(m) - alpha, mpf(0), mpf(50), 60)
    mb = bisect(lambda m: bayr(m) - alpha, mpf(0), mpf(50), 60)
    return mc, mb

mp.dps = 25
mc, mb = sig_limits(mpf("1.2"), mpf("1.5"), 3, mpf("0.05"))
print("signal-syst cls limit  =", mp.nstr(mc, 15))
print("signal-syst bayes limit=", mp.nstr(mb, 15))
print("signal-syst gap        =", mp.nstr(mb - mc, 15), "rel", mp.nstr(abs(mb - mc) / max(mb, mc), 15))

# 20% lognormal background systematic, identity signal
def bkg_limit(kappa, s, b, N, alpha):
    def r(mu):
        a = quad(lambda e: phi(e) * cdf(N, mu * s + b * kappa**e), [-14, -4, 0, 4, 14])
        c = quad(lambda e: phi(e) * cdf(N, b * kappa**e), [-14, -4, 0, 4, 14])
        return a / c
    return bisect(lambda m: r(m) - alpha, mpf(0), mpf(50), 60)

print("bkg 20% cls limit      =", mp.nstr(bkg_limit(mpf("1.2"), 1, mpf("1.5"), 3, mpf("0.05")), 15))
