"""Regenerates the bundled field corpus under fields/ (needs cypari2).

Each record stores the polredabs polynomial and the PARI integral basis
expressed in the power basis. The Rust loader re-verifies everything.
"""
import json
import pathlib
import sys

import cypari2

pari = cypari2.Pari()
pari.allocatemem(2 * 10**9)

QUARTIC = [725, 1125, 1600, 1957, 2000, 2048, 2225, 2304, 2525, 2624, 2777,
           3600, 3981, 4205, 4225, 4352, 4400, 4525, 4752, 4913, 5125, 5225,
           5725, 5744, 6125, 6224, 6809, 7053, 7056, 7168]

QUINTIC = """
x^5-x^4-4*x^3+3*x^2+3*x-1
x^5-5*x^3-x^2+3*x+1
x^5-2*x^4-3*x^3+5*x^2+x-1
x^5-5*x^3+4*x-1
x^5-x^4-5*x^3+2*x^2+5*x+1
x^5-x^4-5*x^3+2*x^2+3*x-1
x^5-x^4-5*x^3+3*x^2+5*x-2
x^5-6*x^3+8*x-1
x^5-6*x^3-x^2+8*x+3
x^5-x^4-5*x^3+5*x^2+2*x-1
x^5-2*x^4-4*x^3+7*x^2+3*x-4
x^5-x^4-5*x^3+4*x^2+4*x-1
x^5-2*x^4-4*x^3+4*x^2+3*x-1
x^5-7*x^3-6*x^2+2*x+1
x^5-6*x^3+6*x-2
x^5-x^4-5*x^3+4*x^2+4*x-2
x^5-x^4-6*x^3+3*x^2+4*x-2
x^5-6*x^3-2*x^2+3*x+1
x^5-6*x^3-x^2+6*x-1
x^5-2*x^4-4*x^3+5*x^2+3*x-2
x^5-6*x^3-3*x^2+4*x+1
x^5-2*x^4-4*x^3+8*x^2-2
x^5-2*x^4-4*x^3+5*x^2+4*x-1
x^5-x^4-5*x^3+4*x^2+3*x-1
x^5-x^4-6*x^3+3*x^2+5*x+1
x^5-x^4-6*x^3+4*x+1
x^5-2*x^4-5*x^3+3*x^2+3*x-1
x^5-x^4-5*x^3+3*x^2+4*x-1
x^5-6*x^3-x^2+5*x-1
x^5-8*x^3+6*x-2
""".split()

SEXTIC = """
x^6-x^5-7*x^4+2*x^3+7*x^2-2*x-1
x^6-x^5-5*x^4+4*x^3+6*x^2-3*x-1
x^6-2*x^5-4*x^4+5*x^3+4*x^2-2*x-1
x^6-x^5-6*x^4+6*x^3+8*x^2-8*x+1
x^6-2*x^5-4*x^4+8*x^3+2*x^2-5*x+1
x^6-x^5-5*x^4+4*x^3+5*x^2-2*x-1
x^6-2*x^5-5*x^4+11*x^3+2*x^2-9*x+1
x^6-x^5-6*x^4+7*x^3+4*x^2-5*x+1
x^6-3*x^5-2*x^4+9*x^3-5*x+1
x^6-9*x^4-4*x^3+9*x^2+3*x-1
x^6-x^5-7*x^4+9*x^3+7*x^2-9*x-1
x^6-x^5-6*x^4+4*x^3+8*x^2-1
x^6-x^5-6*x^4+6*x^3+7*x^2-5*x-1
x^6-7*x^4+14*x^2-7
x^6-6*x^4-2*x^3+7*x^2+2*x-1
x^6-2*x^5-4*x^4+6*x^3+4*x^2-3*x-1
x^6-6*x^4-2*x^3+6*x^2+x-1
x^6-10*x^4+24*x^2-8
x^6-7*x^4-2*x^3+11*x^2+7*x+1
x^6-6*x^4+9*x^2-3
x^6-2*x^5-6*x^4+10*x^3+10*x^2-11*x-1
x^6-6*x^4-x^3+6*x^2-1
x^6-x^5-7*x^4+7*x^3+12*x^2-12*x-1
x^6-3*x^5-2*x^4+9*x^3-x^2-4*x+1
x^6-3*x^5-3*x^4+10*x^3+3*x^2-6*x+1
x^6-2*x^5-5*x^4+9*x^3+6*x^2-9*x+1
x^6-3*x^5-3*x^4+7*x^3+3*x^2-3*x-1
x^6-x^5-6*x^4+2*x^3+9*x^2+x-1
x^6-3*x^5-4*x^4+13*x^3+7*x^2-14*x-7
x^6-7*x^4-x^3+11*x^2+x-1
""".split()

SMALL = ["x-1", "x^2-x-1", "x^2-2", "x^2-x-3",
         "x^3-x^2-2*x+1", "x^3-3*x+1", "x^3-x^2-3*x+1", "x^3-x^2-4*x-1",
         "x^3-4*x+1", "x^3-x^2-4*x+3"]


def quartic_polys():
    out = []
    for group in ["C4", "V4", "D4", "S4"]:
        for p in pari(f'nflist("{group}", [1, 7200], 0)'):
            d = int(pari.nfdisc(p))
            if d in QUARTIC:
                out.append(str(p))
    return out


def record(poly):
    p = pari.polredabs(pari(poly))
    d = int(pari.poldegree(p))
    nf = pari.nfinit(p)
    disc = int(nf[2])
    basis = []
    for w in pari.nfbasis(p):
        row = [str(pari.polcoef(w, i)) for i in range(d)]
        basis.append([r if "/" in r else r + "/1" for r in row])
    coeffs = [int(pari.polcoef(p, i)) for i in range(d + 1)]
    label = f"{d}.{d}.{disc}.1"
    return label, {
        "label": label,
        "degree": d,
        "disc": disc,
        "poly": coeffs,
        "integral_basis": basis,
    }


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "fields")
    out.mkdir(exist_ok=True)
    polys = SMALL + quartic_polys() + QUINTIC + SEXTIC
    for poly in polys:
        label, rec = record(poly)
        (out / f"{label}.json").write_text(json.dumps(rec, indent=1) + "\n")
        print(label)


if __name__ == "__main__":
    main()
