"""Independent reference values for the C++ unit tests.

Uses mpmath (arbitrary precision) and scipy; shares no code with the library.
Run: python3 tests/oracles/reference_values.py
"""
import mpmath as mp
import numpy as np
from scipy import integrate, ndimage

mp.mp.dps = 40


def S(x):
    x = mp.mpf(x)
    return 1 / (1 + mp.exp(-1.6 * x - 0.07 * x**3))


def Phi(x):
    return mp.ncdf(x)


print("S(1)            =", mp.nstr(S(1), 17))
print("S(0.5)          =", mp.nstr(S(0.5), 17))
print("Phi(1)          =", mp.nstr(Phi(1), 17))
print("Phi(0.5)        =", mp.nstr(Phi(0.5), 17))
print("window(0,1)     =", mp.nstr(S(0.5) - S(-0.5), 17))
print("window truth    =", mp.nstr(Phi(0.5) - Phi(-0.5), 17))

# max |S - Phi| on the 1e-3 grid over [0, 6]
grid = [mp.mpf(k) / 1000 for k in range(0, 6001)]
errs = [abs(S(x) - Phi(x)) for x in grid]
k = max(range(len(errs)), key=lambda i: errs[i])
print("max|S-Phi|      =", mp.nstr(errs[k], 12), "at x =", mp.nstr(grid[k], 6))


def analytic_iso(sigma):
    w = S(mp.mpf(0.5) / sigma) - S(mp.mpf(-0.5) / sigma)
    return 2 * mp.pi * sigma * sigma * w * w


def truth_iso(sigma):
    w = Phi(mp.mpf(0.5) / sigma) - Phi(mp.mpf(-0.5) / sigma)
    return 2 * mp.pi * sigma * sigma * w * w


for s in (1, 6.6):
    print(f"analytic iso {s:<4}=", mp.nstr(analytic_iso(s), 12), " truth =", mp.nstr(truth_iso(s), 12))

# 2D quadrature of a unit-height Gaussian over the unit window, cov [[2,1],[1,2]]
# at offset (0.7, -0.3) from the mean.
C = np.array([[2.0, 1.0], [1.0, 2.0]])
Ci = np.linalg.inv(C)
def unit_height(y, x, ox, oy):
    d = np.array([x + ox, y + oy])
    return np.exp(-0.5 * d @ Ci @ d)
val, _ = integrate.dblquad(unit_height, -0.5, 0.5, -0.5, 0.5, args=(0.7, -0.3), epsabs=1e-13)
print("window [[2,1],[1,2]] @ (0.7,-0.3) =", repr(val))

# supersample n -> large at cov=I, pixel=mean equals the window integral of a unit-height Gaussian
val, _ = integrate.dblquad(lambda y, x: np.exp(-0.5 * (x * x + y * y)), -0.5, 0.5, -0.5, 0.5, epsabs=1e-14)
print("window I @ mean (unit height) =", repr(val))

# SSIM reference: 11x11 Gaussian window sigma 1.5, zero padding, K1 .01, K2 .03.
g1 = np.exp(-((np.arange(11) - 5) ** 2) / (2 * 1.5**2))
g1 /= g1.sum()
win = np.outer(g1, g1)


def ssim(a, b):
    out = []
    for c in range(a.shape[2]):
        x, y = a[..., c], b[..., c]
        f = lambda z: ndimage.correlate(z, win, mode="constant", cval=0.0)
        mx, my = f(x), f(y)
        sxx = f(x * x) - mx * mx
        syy = f(y * y) - my * my
        sxy = f(x * y) - mx * my
        C1, C2 = 0.01**2, 0.03**2
        s = ((2 * mx * my + C1) * (2 * sxy + C2)) / ((mx * mx + my * my + C1) * (sxx + syy + C2))
        out.append(s)
    return float(np.mean(out))


a = np.full((16, 16, 3), 0.2)
b = np.full((16, 16, 3), 0.7)
print("ssim const 0.2 vs 0.7 (16x16) =", repr(ssim(a, b)))

# Structured test image: smooth ramp plus a sinusoid, reproduced in the C++ test.
h, w = 24, 20
yy, xx = np.mgrid[0:h, 0:w]
img = np.zeros((h, w, 3))
img[..., 0] = 0.5 + 0.4 * np.sin(0.7 * xx) * np.cos(0.3 * yy)
img[..., 1] = (xx + yy) / (w + h)
img[..., 2] = 0.5 + 0.3 * np.cos(0.45 * xx + 0.2 * yy)
print("ssim img vs 1-img =", repr(ssim(img, 1 - img)))
shifted = np.clip(img + 0.05 * np.sin(1.3 * xx + 0.4 * yy)[..., None], 0, 1)
print("ssim img vs perturbed =", repr(ssim(img, shifted)))

# Bicubic downsampling reference: PIL's antialiased BICUBIC (a = -0.5) on a
# float image. PIL works in float32, so agreement is ~1e-6.
from PIL import Image as PILImage

h, w = 16, 24
yy, xx = np.mgrid[0:h, 0:w]
plane = (0.5 + 0.3 * np.sin(0.9 * xx + 0.2 * yy) + 0.15 * np.cos(0.5 * yy)).astype(np.float32)
for f in (2, 4):
    out = np.asarray(PILImage.fromarray(plane, mode="F").resize((w // f, h // f), PILImage.BICUBIC))
    print(f"bicubic factor {f}: [0,0]={out[0,0]!r} [1,2]={out[1,2]!r} [{h//f-1},{w//f-1}]={out[-1,-1]!r}")
cb = ((np.arange(128)[None, :] + np.arange(128)[:, None]) % 2).astype(np.float32)
out = np.asarray(PILImage.fromarray(cb, mode="F").resize((16, 16), PILImage.BICUBIC))
print("checkerboard /8 range", out.min(), out.max())
