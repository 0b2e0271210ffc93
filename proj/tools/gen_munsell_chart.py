#!/usr/bin/env python3
"""Regenerate data/munsell_chart.csv from the Munsell renotation data.

Requires the `colour-science` package. Chromatic chips take the highest
renotation chroma for each hue/value pair ("real" subset) whose colour lies
inside the sRGB gamut, so the chart matches what a display can show; the
neutral column follows the ASTM D1535 value function. xyY under Illuminant C
is adapted to D65 (Bradford) before the CIE L*a*b* conversion.
"""
import sys

import numpy as np
import colour
from colour.notation.datasets.munsell import MUNSELL_COLOURS_REAL

HUE_FAMILIES = ["R", "YR", "Y", "GY", "G", "BG", "B", "PB", "P", "RP"]
HUE_STEPS = ["2.5", "5", "7.5", "10"]
VALUES = [9, 8, 7, 6, 5, 4, 3, 2]
NEUTRALS = [9.5, 9, 8, 7, 6, 5, 4, 3, 2, 1.5]

D65 = colour.CCS_ILLUMINANTS["CIE 1931 2 Degree Standard Observer"]["D65"]
C = colour.CCS_ILLUMINANTS["CIE 1931 2 Degree Standard Observer"]["C"]


def xyY_to_lab(xyY):
    XYZ = colour.xyY_to_XYZ(xyY)
    XYZ = colour.chromatic_adaptation(XYZ, colour.xy_to_XYZ(C), colour.xy_to_XYZ(D65), method="Von Kries",
                                      transform="Bradford")
    return colour.XYZ_to_Lab(XYZ, D65)


def in_srgb_gamut(xyY, tol=1e-3):
    XYZ = colour.xyY_to_XYZ(np.array([xyY[0], xyY[1], xyY[2] / 100.0]))
    XYZ = colour.chromatic_adaptation(XYZ, colour.xy_to_XYZ(C), colour.xy_to_XYZ(D65), method="Von Kries",
                                      transform="Bradford")
    rgb = colour.XYZ_to_RGB(XYZ, colour.RGB_COLOURSPACES["sRGB"], D65, apply_cctf_encoding=False)
    return bool(np.all(rgb >= -tol) and np.all(rgb <= 1 + tol))


def main(out):
    table = {}
    for (hue, value, chroma), xyY in MUNSELL_COLOURS_REAL:
        table.setdefault((hue, value), []).append((chroma, xyY))

    rows = []
    for r, n in enumerate(NEUTRALS):
        Y = colour.notation.munsell.luminance_ASTMD1535(n) / 100.0
        L = 116.0 * np.cbrt(Y) - 16.0 if Y > 216 / 24389 else Y * 24389 / 27
        rows.append((f"N{n:g}", L, 0.0, 0.0, r, 0))
    col = 1
    for fam in HUE_FAMILIES:
        for step in HUE_STEPS:
            hue = step + fam
            for r, v in enumerate(VALUES, start=1):
                candidates = sorted(table[(hue, float(v))], key=lambda e: -e[0])
                chroma, xyY = candidates[-1]
                for c, cand in candidates:
                    if in_srgb_gamut(cand):
                        chroma, xyY = c, cand
                        break
                xyY = np.array([xyY[0], xyY[1], xyY[2] / 100.0])
                L, a, b = xyY_to_lab(xyY)
                rows.append((f"{hue} {v}/{chroma:g}", L, a, b, r, col))
            col += 1

    with open(out, "w") as f:
        f.write("# Munsell chart: 320 chromatic chips (hues 2.5R..10RP, values 9..2, highest in-sRGB-gamut chroma)\n")
        f.write("# and 10 neutral chips (N9.5..N1.5). Source: Munsell renotation data (real subset), xyY under\n")
        f.write("# Illuminant C, Bradford-adapted to D65, CIE L*a*b* with D65 white. Generated by tools/gen_munsell_chart.py.\n")
        f.write("notation,L,a,b,row,column\n")
        for note, L, a, b, r, c in rows:
            f.write(f"{note},{L:.4f},{a:.4f},{b:.4f},{r},{c}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/munsell_chart.csv")
