#!/usr/bin/env python3
"""Monte-Carlo demo: how sigmoid output noise shapes the expected incoherence
of an (event, complement) probe pair.

For a goal credence p, the two probe readings are sigmoid(logit(p) + noise)
and sigmoid(logit(1-p) + noise) with independent N(0, S^2) noise. The expected
pair incoherence under f or fo is approximately S^2 * p * (1 - p) / 2, so the
incoherence term alone already favors decisive probes. This script samples the
readings, feeds them through the `coherence probe-loss` command, and prints
the measured average next to that prediction.

Usage: samples/probe_noise_demo.py [path-to-coherence-binary]
"""

import json
import math
import random
import subprocess
import sys
import tempfile

BINARY = sys.argv[1] if len(sys.argv) > 1 else "build/tools/coherence"
NOISE_SD = 0.2
TRIALS = 400

def sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))

def logit(p):
    return math.log(p / (1.0 - p))

def pair_incoherence(q_e, q_ec, loss):
    problem = {
        "atoms": ["e", "not_e"],
        "events": [
            {"name": "E", "atoms": ["e"]},
            {"name": "E_complement", "atoms": ["not_e"]},
        ],
        "probe_values": [[[q_e], [q_ec]]],
    }
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as handle:
        json.dump(problem, handle)
        path = handle.name
    out = subprocess.run(
        [BINARY, "probe-loss", path, "--loss", loss, "--decisiveness", "none"],
        capture_output=True, text=True, check=True)
    return json.loads(out.stdout)["incoherence_term"]

def main():
    rng = random.Random(0)
    print(f"noise sd = {NOISE_SD}, {TRIALS} samples per point")
    print("p      loss  E[L*] measured  S^2 p(1-p)/2")
    for p in (0.5, 0.7, 0.9, 0.97):
        predicted = NOISE_SD ** 2 * p * (1.0 - p) / 2.0
        for loss in ("f", "fo"):
            total = 0.0
            for _ in range(TRIALS):
                q_e = sigmoid(logit(p) + rng.gauss(0.0, NOISE_SD))
                q_ec = sigmoid(logit(1.0 - p) + rng.gauss(0.0, NOISE_SD))
                total += pair_incoherence(q_e, q_ec, loss)
            print(f"{p:.2f}   {loss:3s}   {total / TRIALS:.6f}      {predicted:.6f}")

if __name__ == "__main__":
    main()
