"""Reference poverty and inequality measures (mpmath root finding and quadrature)."""
import mpmath as mp

mp.mp.dps = 30
F = mp.mpf

def ortega(a, b):
    return lambda p: p**a * (1 - (1 - p)**b)

def l3(a, b, d, s):
    return lambda p: p**(a * d) * (1 - (1 - p * s**d)**b) / (1 - (1 - s**d)**b)

def gq(a, b, c):
    e = -(a + b + c + 1); m = b * b - 4 * a; n = 2 * b * e - 4 * c
    return lambda p: -(b * p + e + mp.sqrt(m * p * p + n * p + e * e)) / 2

def measures(name, L, mu, z, h_guess):
    dL = lambda p: mp.diff(L, p)
    H = mp.findroot(lambda p: mu * dL(p) - z, h_guess)
    fgt1 = H - mu / z * L(H)
    fgt2 = mp.quad(lambda p: (1 - mu * dL(p) / z) ** 2, [0, H])
    watts = mp.quad(lambda p: mp.log(z / (mu * dL(p))), [0, H])
    gini = 1 - 2 * mp.quad(L, [0, 1])
    mld = -mp.quad(lambda p: mp.log(dL(p)), [0, mp.mpf('0.5'), 1])
    vals = ", ".join(mp.nstr(v, 17) for v in (H, fgt1, fgt2, watts, gini, mld))
    print(f"{{{name}, {{{mu}, {z}}}, {{{vals}}}}},")

measures("Ortega{1.7, 0.45}", ortega(F("1.7"), F("0.45")), 2, F("1.1"), 0.5)
measures("L3{0.5, 0.8, 1.5, 0.7}", l3(F("0.5"), F("0.8"), F("1.5"), F("0.7")), 3, F("1.2"), 0.2)
measures("GeneralQuadratic{0.8, -1.2, 0.4}", gq(F("0.8"), F("-1.2"), F("0.4")), F("1.5"), 1, 0.3)
