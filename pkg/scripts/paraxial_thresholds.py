"""Range at which square (and aspect-ratio beta) arrays at D = 10 beta L enter the
concentration regime, plus exact-vs-Fresnel agreement as D grows."""

import numpy as np

from losdof import ArrayAperture, Link, build_channel_matrix, freq2wlen, kernel_agreement, sample_grid
from losdof.landau import paraxial_margins


def threshold(freq, beta):
    lam = float(freq2wlen(freq))
    # concentration ratio grows linearly in D along D = 10 beta L; solve ratio = 1
    def ratio(D):
        L = D / (10 * beta)
        ap = ArrayAperture("rectangle", (beta * L, L / beta))
        return paraxial_margins(Link(lam, D, ap, ap))["concentration"]
    return 1.0 / ratio(1.0)


def main():
    for beta in (1.0, 4.0):
        print(f"100 GHz, beta={beta:g}: concentration needs D >> {threshold(100e9, beta):.3f} m")
    L = 0.2
    lam = float(freq2wlen(300e9))
    ap = ArrayAperture("interval", (L,))
    g = sample_grid(ap, 64)
    for k in (1, 2, 5, 10, 20):
        link = Link(lam, k * L, ap, ap)
        a = kernel_agreement(build_channel_matrix(link, g, g, "exact"),
                             build_channel_matrix(link, g, g, "fresnel"))
        print(f"300 GHz, D={k:2d}L: agreement {a:.6f}")


if __name__ == "__main__":
    main()
