"""Double-precision reference dynamics: confirms every trajectory-level
threshold asserted by the C++ tests, independently of the C++ code."""
import math

E = [[0.5, 0.1, 0.8], [0.9, 0.5, 0.1], [0.2, 0.9, 0.5]]
NASH = [4 / 11, 3 / 11, 4 / 11]
INIT = [0.2, 0.5, 0.3]
U3 = [1 / 3] * 3


def matvec(P, v):
    n = len(v)
    return [sum(P[i][j] * v[j] for j in range(n)) for i in range(n)]


def prox(ref, g):
    m = max(gi for r, gi in zip(ref, g) if r > 0)
    out = [r * math.exp(gi - m) if r > 0 else 0.0 for r, gi in zip(ref, g)]
    s = sum(out)
    return [x / s for x in out]


def kl(p, q):
    return sum(a * math.log(a / b) for a, b in zip(p, q) if a > 0)


def gap(P, p):
    g = matvec(P, p)
    return max(0.0, max(g) - 0.5)


def inf_dist(a, b):
    return max(abs(x - y) for x, y in zip(a, b))


def reg_grad(P, mu, ref, tau):
    g = matvec(P, mu)
    return [g[i] - tau * (math.log(mu[i] / ref[i]) + 1.0) for i in range(len(mu))]


# ---------- MWU ----------
def run_mwu(P, eta, T, init):
    traj = [list(init)]
    pi = list(init)
    for _ in range(T - 1):
        pi = prox(pi, [eta * x for x in matvec(P, pi)])
        traj.append(pi)
    return traj


print("---- MWU eta=0.3 T=5000 ----")
traj = run_mwu(E, 0.3, 5000, INIT)
gaps = [gap(E, p) for p in traj]
w = gaps[-500:]
print("min gap last 500 =", min(w), " (need > 0.02)")
print("KL(nash||pi_50) =", kl(NASH, traj[49]), " KL(nash||pi_T) =", kl(NASH, traj[-1]), "(need latter bigger)")

print("---- MWU eta=3 T=5000 (iter-IPO sampled analogue) ----")
traj3 = run_mwu(E, 3.0, 5000, INIT)
print("min gap last 500 =", min(gap(E, p) for p in traj3[-500:]), " (need > 0.02)")

# ---------- regularized solver / fixed points ----------
def reg_solve_fixed_iters(P, ref, tau, eta, n_updates):
    mu = list(ref)
    out = [list(mu)]
    for _ in range(n_updates):
        mu = prox(mu, [eta * x for x in reg_grad(P, mu, ref, tau)])
        out.append(list(mu))
    return out


def reg_fixed_point(P, ref, tau, eta=None, tol=0.0, max_iter=2000000):
    if eta is None:
        eta = tau / (tau * tau + 0.5)
    mu = list(ref)
    prev = None
    for k in range(max_iter):
        nxt = prox(mu, [eta * x for x in reg_grad(P, mu, ref, tau)])
        if nxt == mu or (prev is not None and nxt == prev):
            return nxt, k + 1
        prev, mu = mu, nxt
    raise RuntimeError("no float fixed point")


PT_U, it_u = reg_fixed_point(E, U3, 0.1)
print("\npi*_tau(ref=uniform) fixed point iters:", it_u, PT_U)
PT_I, it_i = reg_fixed_point(E, INIT, 0.1)
print("pi*_tau(ref=init) fixed point iters:", it_i, PT_I)

print("---- Theorem-2 rate: eta=tau/(tau^2+0.5), K=500, ref=uniform ----")
tau = 0.1
eta_safe = tau / (tau * tau + 0.5)
seq = reg_solve_fixed_iters(E, U3, tau, eta_safe, 499)
kl0 = kl(PT_U, U3)
worst = -1e9
for k in range(1, len(seq)):
    bound = (1 - eta_safe * tau / 2) ** k * kl0 * (1 + 1e-6)
    val = kl(PT_U, seq[k])
    worst = max(worst, val - bound)
print("max (kl - bound) over k =", worst, " (need <= 0)")

# ---------- COMAL ----------
def comal_fixed_k(P, eta, tau, T, K_updates, init):
    outer = [list(init)]
    pi = list(init)
    for t in range(T - 1):
        ref = pi
        mu = list(ref)
        for _ in range(K_updates):
            mu = prox(mu, [eta * x for x in reg_grad(P, mu, ref, tau)])
        pi = mu
        outer.append(list(pi))
    return outer


def comal_exact(P, eta, tau, T, init, eps_schedule=None):
    """Inner solves run to a floating-point fixed point (or 2-cycle), or stop
    early when KL(mu',mu)/(eta*tau/2)^2 <= eps_t."""
    outer = [list(init)]
    inner_counts = []
    pi = list(init)
    for t in range(1, T):
        ref = pi
        mu = list(ref)
        prev = None
        eps_t = eps_schedule(t) if eps_schedule else 0.0
        for k in range(1000000):
            nxt = prox(mu, [eta * x for x in reg_grad(P, mu, ref, tau)])
            stop = nxt == mu or (prev is not None and nxt == prev)
            if not stop and eps_t > 0:
                d = kl(nxt, mu)
                stop = d / (eta * tau / 2) ** 2 <= eps_t
            if stop:
                mu = nxt
                inner_counts.append(k + 1)
                break
            prev, mu = mu, nxt
        else:
            raise RuntimeError("inner did not terminate at t=%d" % t)
        pi = mu
        outer.append(list(pi))
    return outer, inner_counts


print("\n---- COMAL FixedK: T=200, 25 inner updates, eta=0.3 tau=0.1 ----")
outer = comal_fixed_k(E, 0.3, 0.1, 200, 25, INIT)
print("final inf-dist to nash =", inf_dist(outer[-1], NASH), " (need < 1e-3)")
print("final gap =", gap(E, outer[-1]), " (need < 1e-3)")
print("final KL(nash||pi) =", kl(NASH, outer[-1]), " (need < 1e-5)")
print("  with 24 updates instead:", inf_dist(comal_fixed_k(E, 0.3, 0.1, 200, 24, INIT)[-1], NASH))

print("\n---- COMAL exact-inner: T=200 eta=0.3 tau=0.1 ----")
outer_ex, counts = comal_exact(E, 0.3, 0.1, 200, INIT)
print("final inf-dist =", inf_dist(outer_ex[-1], NASH), "; inner iters: max", max(counts), "total", sum(counts))
kls = [kl(NASH, p) for p in outer_ex]
viol = max(kls[t + 1] - kls[t] for t in range(len(kls) - 1))
print("max KL increase per outer step =", viol, " (need <= 1e-9)")
# Lemma: KL(pi*||pi_new) <= KL(pi*||ref) - KL(pi_new||ref)
lemma_viol = max(kl(NASH, outer_ex[t + 1]) - (kl(NASH, outer_ex[t]) - kl(outer_ex[t + 1], outer_ex[t]))
                 for t in range(len(outer_ex) - 1))
print("max single-step lemma violation =", lemma_viol, " (need <= 1e-9)")
path = sum(kl(outer_ex[t + 1], outer_ex[t]) for t in range(len(outer_ex) - 1))
print("path length sum =", path, " vs KL(nash||init) =", kl(NASH, INIT), " (need <=)")
print("min iterate entry along run =", min(min(p) for p in outer_ex))
print("COMAL started at nash: max dist over 10 outers =",
      max(inf_dist(p, NASH) for p in comal_exact(E, 0.3, 0.1, 10, NASH)[0]), "(need < 1e-6)")

print("\n---- COMAL Theoretical mode: eps_t = c1^2/(9 t^4) ----")
c1 = 3.6494912039138046e-12
outer_th, counts_th = comal_exact(E, 0.3, 0.1, 200, INIT, eps_schedule=lambda t: c1 * c1 / (9 * t ** 4))
print("final inf-dist =", inf_dist(outer_th[-1], NASH), " (need < 1e-3); inner max", max(counts_th), "total", sum(counts_th))
kls_th = [kl(NASH, p) for p in outer_th]
viol_th = max(kls_th[t + 1] - kls_th[t] - 1.0 / (t + 1) ** 2 for t in range(len(kls_th) - 1))
print("max relaxed-monotonicity violation =", viol_th, " (need <= 1e-9)")

print("\n---- INPO exact: ref=init, tau=0.1 eta=0.3 T=5000 ----")
mu = list(INIT)
for _ in range(4999):
    mu = prox(mu, [0.3 * x for x in reg_grad(E, mu, INIT, 0.1)])
print("final =", mu)
print("dist from pi*_tau(ref=init) =", inf_dist(mu, PT_I), " (need < 1e-6)")
print("dist from nash =", inf_dist(mu, NASH), " (need > 1e-3)")

print("\n---- Mirror-Prox eta=0.3 T=2000 ----")
pi = list(INIT)
for _ in range(1999):
    half = prox(pi, [0.3 * x for x in matvec(E, pi)])
    pi = prox(pi, [0.3 * x for x in matvec(E, half)])
print("final gap =", gap(E, pi), " (need < 1e-3); dist to nash =", inf_dist(pi, NASH))

print("\n---- OMWU eta=0.1 T=5000 ----")
pi_prev = list(INIT)
pi = list(INIT)
g_prev = matvec(E, pi_prev)
for _ in range(4999):
    g_cur = matvec(E, pi)
    nxt = prox(pi, [0.1 * (2 * a - b) for a, b in zip(g_cur, g_prev)])
    g_prev = g_cur
    pi = nxt
print("final gap =", gap(E, pi), " (need < 1e-3); dist to nash =", inf_dist(pi, NASH))
