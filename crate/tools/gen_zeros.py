#!/usr/bin/env python3
"""Generate critical-line zero ordinates of Dirichlet L-functions.

For every non-principal character modulo each requested k, the inducing
primitive character is found, the real rotation

    Z(t) = eps^{-1/2} (f/pi)^{it/2} Gamma((1/2 + a + it)/2) L(1/2 + it, chi*) / |Gamma(...)|

is scanned on a fine grid, and sign changes are refined with a secant/bisection
root finder at high working precision.  The scan count is compared against the
smooth zero-counting term so missed pairs are reported.

Characters are enumerated by brute force (all multiplicative maps from the unit
group into the roots of unity), independent of the Rust character table.

Usage: gen_zeros.py OUT_DIR [--count N] [--moduli 3,4,5,8,12] [--step 0.02]
"""

import argparse
import hashlib
import itertools
import json
import math
import os
import sys
from fractions import Fraction

import mpmath as mp


def units(k):
    return [a for a in range(k) if math.gcd(a, k) == 1]


def exponent(k):
    us = units(k)
    lam = 1
    for a in us:
        o, x = 1, a % k
        while x != 1 % k:
            x = x * a % k
            o += 1
        lam = lam * o // math.gcd(lam, o)
    return lam


def characters(k):
    """All characters as dicts unit -> Fraction turn in [0,1)."""
    us = units(k)
    lam = exponent(k)
    found = []
    # a character is determined by values on all units; brute force over a
    # generating set found greedily, then check multiplicativity everywhere
    gens = []
    span = {1 % k}
    for a in us:
        if a not in span:
            gens.append(a)
            new = set(span)
            frontier = True
            while frontier:
                frontier = False
                for x in list(new):
                    for g in gens:
                        y = x * g % k
                        if y not in new:
                            new.add(y)
                            frontier = True
            span = new
    for vals in itertools.product(range(lam), repeat=len(gens)):
        # build by BFS over words in the generators
        chi = {1 % k: Fraction(0)}
        frontier = [1 % k]
        ok = True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for g, v in zip(gens, vals):
                    y = x * g % k
                    t = (chi[x] + Fraction(v, lam)) % 1
                    if y in chi:
                        if chi[y] != t:
                            ok = False
                            break
                    else:
                        chi[y] = t
                        nxt.append(y)
                if not ok:
                    break
            frontier = nxt
        if not ok:
            continue
        if all((chi[a] + chi[b] - chi[a * b % k]) % 1 == 0 for a in us for b in us):
            found.append(chi)
    # deduplicate
    uniq = []
    for c in found:
        if c not in uniq:
            uniq.append(c)
    assert len(uniq) == len(us), (k, len(uniq))
    return uniq


def conductor(k, chi):
    for f in range(1, k + 1):
        if k % f:
            continue
        if all(chi[a] == 0 for a in chi if a % f == 1 % f):
            return f
    return k


def primitive(k, chi, f):
    """Values of the inducing character mod f, as Fractions (None for non-units)."""
    prim = []
    for n in range(f):
        if math.gcd(n, f) != 1:
            prim.append(None)
            continue
        a = n
        while math.gcd(a, k) != 1:
            a += f
        prim.append(chi[a % k])
    return prim


def fingerprint(k, chi):
    toks = []
    for a in range(k):
        if a in chi:
            t = chi[a]
            toks.append(f"{t.numerator}/{t.denominator}")
        else:
            toks.append("0")
    return ",".join(toks)


class Rotation:
    def __init__(self, f, prim):
        self.f = f
        self.vals = [mp.mpf(0) if v is None else mp.expjpi(2 * mp.mpf(v.numerator) / v.denominator) for v in prim]
        m1 = prim[f - 1]
        self.a = 0 if m1 == 0 else 1
        tau = mp.fsum(self.vals[n] * mp.expjpi(mp.mpf(2 * n) / f) for n in range(f))
        eps = tau / ((1j) ** self.a * mp.sqrt(f))
        self.rot = 1 / mp.sqrt(eps)

    def complex_value(self, t):
        s = mp.mpc(0.5, t)
        L = mp.dirichlet(s, self.vals)
        g = mp.loggamma((0.5 + self.a + 1j * t) / 2)
        phase = mp.expj(t / 2 * mp.log(self.f / mp.pi) + g.imag)
        return self.rot * phase * L

    def z(self, t):
        return self.complex_value(t).real

    def theta(self, t):
        g = mp.loggamma((0.5 + self.a + 1j * t) / 2)
        return t / 2 * mp.log(self.f / mp.pi) + g.imag


def refine(rot, lo, hi, zlo, zhi):
    try:
        return mp.findroot(rot.z, (lo, hi), solver="anderson", tol=mp.mpf(10) ** (-(mp.mp.dps - 6)))
    except Exception:
        a, b, fa = mp.mpf(lo), mp.mpf(hi), zlo
        for _ in range(200):
            m = (a + b) / 2
            fm = rot.z(m)
            if fm == 0:
                return m
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
            if b - a < mp.mpf(10) ** (-(mp.mp.dps - 4)):
                break
        return (a + b) / 2


def zeros_for(rot, count, step, scan_dps):
    out = []
    t = mp.mpf(step) / 4
    with mp.workdps(scan_dps):
        zprev = rot.z(t)
    while len(out) < count:
        t2 = t + step
        with mp.workdps(scan_dps):
            z2 = rot.z(t2)
            if zprev == 0:
                zprev = rot.z(t + step / 1000)
        if (zprev > 0) != (z2 > 0):
            g = refine(rot, t, t2, rot.z(t), rot.z(t2))
            if not (t <= g <= t2):
                raise RuntimeError(f"root escaped bracket near {t}")
            out.append(g)
        t, zprev = t2, z2
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--moduli", default="3,4,5,8,12")
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--scan-dps", type=int, default=15)
    ap.add_argument("--dps", type=int, default=30)
    args = ap.parse_args()
    mp.mp.dps = args.dps
    os.makedirs(args.out, exist_ok=True)
    manifest = {"generator": "tools/gen_zeros.py", "mpmath": mp.__version__, "dps": args.dps,
                "scan_step": args.step, "scan_dps": args.scan_dps, "files": []}
    for k in [int(x) for x in args.moduli.split(",")]:
        for idx, chi in enumerate(characters(k)):
            if all(v == 0 for v in chi.values()):
                continue
            f = conductor(k, chi)
            prim = primitive(k, chi, f)
            rot = Rotation(f, prim)
            gs = zeros_for(rot, args.count, args.step, args.scan_dps)
            # smooth count sanity: (theta(T) - theta(0))/pi vs found count
            T = gs[-1] + mp.mpf("1e-9")
            smooth = (rot.theta(T) - rot.theta(0)) / mp.pi
            imag_resid = max(abs(rot.complex_value(g).imag) for g in gs[:5])
            fp = fingerprint(k, chi)
            name = f"k{k}_c{f}_{hashlib.sha256(fp.encode()).hexdigest()[:8]}.txt"
            lines = [f"# modulus: {k}", f"# character: {fp}",
                     f"# source: mpmath {mp.__version__} real-rotation scan, step {args.step}, dps {args.dps}, conductor {f}"]
            lines += [mp.nstr(g, 20, strip_zeros=False) for g in gs]
            body = "\n".join(lines) + "\n"
            with open(os.path.join(args.out, name), "w") as fh:
                fh.write(body)
            manifest["files"].append({"file": name, "modulus": k, "conductor": f, "character": fp,
                                      "zeros": len(gs), "max_height": mp.nstr(gs[-1], 20),
                                      "smooth_count": float(smooth),
                                      "sha256": hashlib.sha256(body.encode()).hexdigest()})
            print(f"k={k} f={f} chi={fp} zeros={len(gs)} H={float(gs[-1]):.3f} smooth={float(smooth):.2f} "
                  f"imag={float(imag_resid):.1e}", flush=True)
    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    sys.exit(main())
