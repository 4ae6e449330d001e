#!/usr/bin/env python3
"""Regenerate tests/data/ref100 with the reference `wfdb` Python package.

The record mimics the layout of MIT-BIH record 100 (2 channels, 360 Hz,
format 212, 650000 samples). The signal and annotations are written by
wfdb.wrsamp / wfdb.wrann and then read back with wfdb.rdrecord /
wfdb.rdann; the read-back values are frozen as the conformance oracle.
"""
import os
import sys

import numpy as np
import wfdb

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from dump_reference import dump  # noqa: E402

OUT = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
    os.path.dirname(__file__), "..", "tests", "data", "ref100")
FS = 360
N = 650000
rng = np.random.default_rng(100)


def beat(t, center, kind):
    # Gaussian-sum beat in mV
    if kind == "V":
        waves = [(-0.25, 0.03, -0.6), (0.0, 0.05, 1.6), (0.18, 0.09, -0.5)]
    elif kind == "A":
        waves = [(-0.16, 0.02, 0.25), (-0.03, 0.01, -0.1), (0.0, 0.012, 1.1),
                 (0.03, 0.01, -0.25), (0.25, 0.05, 0.3)]
    else:
        waves = [(-0.2, 0.025, 0.15), (-0.03, 0.01, -0.12), (0.0, 0.012, 1.2),
                 (0.03, 0.01, -0.3), (0.28, 0.05, 0.35)]
    y = np.zeros_like(t)
    for off, width, amp in waves:
        y += amp * np.exp(-0.5 * ((t - center - off) / width) ** 2)
    return y


t = np.arange(N) / FS
mv0 = 0.05 * np.sin(2 * np.pi * 0.3 * t) + 0.01 * rng.standard_normal(N)
mv1 = 0.04 * np.sin(2 * np.pi * 0.2 * t + 1.0) + 0.01 * rng.standard_normal(N)

samples, symbols, subtypes, chans, nums, auxes = [], [], [], [], [], []


def add(s, sym, sub=0, chan=0, num=0, aux=""):
    samples.append(s)
    symbols.append(sym)
    subtypes.append(sub)
    chans.append(chan)
    nums.append(num)
    auxes.append(aux)


add(18, "+", aux="(N")
pos = 77
gap_done = False
while pos < N - 400:
    r = rng.random()
    kind = "V" if r < 0.02 else ("A" if r < 0.05 else "N")
    lo, hi = max(0, pos - 200), min(N, pos + 200)
    seg = t[lo:hi]
    mv0[lo:hi] += beat(seg, pos / FS, kind)
    mv1[lo:hi] += 0.6 * beat(seg, pos / FS, kind)
    add(pos, kind, num=1 if kind == "V" else 0)
    rr = 0.8 + 0.05 * rng.standard_normal()
    if kind == "A":
        rr += 0.2
    pos += int(rr * FS)
    if not gap_done and pos > 200000:
        # 6 s of noise with no beats: forces a SKIP escape in the .atr
        add(pos, "~", sub=1, chan=1)
        pos += 6 * FS
        add(pos, "~", sub=-1, chan=1)
        add(pos + 3, "+", aux="(AB")
        pos += 40
        gap_done = True
    if len(samples) == 1200:
        add(pos - 100, "|")

d0 = np.clip(np.round(mv0 * 200) + 1024, -2047, 2047).astype(np.int64)
d1 = np.clip(np.round(mv1 * 200) + 1024, -2047, 2047).astype(np.int64)
# pin extremes so sign extension is exercised on both channels
d0[1000], d0[1001], d1[1000], d1[1001] = 2047, -2047, -2047, 2047
d0[1002], d1[1003] = -1, -1024
d_signal = np.stack([d0, d1], axis=1)

os.makedirs(OUT, exist_ok=True)
cwd = os.getcwd()
os.chdir(OUT)
wfdb.wrsamp("100", fs=FS, units=["mV", "mV"], sig_name=["MLII", "V5"],
            d_signal=d_signal, fmt=["212", "212"], adc_gain=[200.0, 200.0],
            baseline=[1024, 1024])
wfdb.wrann("100", "atr", np.array(samples), symbol=symbols,
           subtype=np.array(subtypes), chan=np.array(chans),
           num=np.array(nums), aux_note=auxes)

os.chdir(cwd)

n, lo, hi = dump(OUT, "100", OUT)
print(f"{n} annotations, range [{lo}, {hi}]")
