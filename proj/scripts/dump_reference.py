#!/usr/bin/env python3
"""Dump what the reference `wfdb` Python reader sees in a record.

usage: dump_reference.py <record dir> <record id> <out dir>

Writes reference.json (header fields, per-channel sums and SHA-256 of the
samples as little-endian int32), reference_head.csv (first 2000 samples)
and reference_ann.csv (every annotation).
"""
import hashlib
import json
import os
import sys

import numpy as np
import wfdb


def dump(record_dir, record_id, out):
    path = os.path.join(record_dir, record_id)
    rec = wfdb.rdrecord(path, physical=False)
    ann = wfdb.rdann(path, "atr")
    os.makedirs(out, exist_ok=True)
    sig = rec.d_signal.astype("<i4")
    ref = {
        "record_name": rec.record_name,
        "n_sig": rec.n_sig,
        "fs": rec.fs,
        "sig_len": rec.sig_len,
        "sig_name": rec.sig_name,
        "adc_gain": rec.adc_gain,
        "baseline": rec.baseline,
        "fmt": rec.fmt,
        "checksum": rec.checksum,
        "channel_sums": [int(sig[:, c].sum()) for c in range(rec.n_sig)],
        "channel_sha256": [hashlib.sha256(np.ascontiguousarray(sig[:, c]).tobytes()).hexdigest()
                           for c in range(rec.n_sig)],
        "min": int(sig.min()),
        "max": int(sig.max()),
    }
    with open(os.path.join(out, "reference.json"), "w") as f:
        json.dump(ref, f, indent=1)
    with open(os.path.join(out, "reference_head.csv"), "w") as f:
        f.write("index," + ",".join(f"ch{c}" for c in range(rec.n_sig)) + "\n")
        for i in range(min(2000, rec.sig_len)):
            f.write(f"{i}," + ",".join(str(sig[i, c]) for c in range(rec.n_sig)) + "\n")
    with open(os.path.join(out, "reference_ann.csv"), "w") as f:
        f.write("sample,symbol,subtype,chan,num,aux\n")
        for i in range(len(ann.sample)):
            aux = ann.aux_note[i] if ann.aux_note[i] else ""
            f.write(f"{ann.sample[i]},{ann.symbol[i]},{ann.subtype[i]},{ann.chan[i]},{ann.num[i]},{aux}\n")
    return len(ann.sample), int(sig.min()), int(sig.max())


if __name__ == "__main__":
    if len(sys.argv) != 4:
        sys.exit(__doc__)
    n, lo, hi = dump(sys.argv[1], sys.argv[2], sys.argv[3])
    print(f"{n} annotations, range [{lo}, {hi}]")
