"""Scratch measurements for acceptance-test calibration (not shipped)."""
import time

import numpy as np

from walklocus.couplings import couple_walks, default_starts, traces_coincide
from walklocus.cutedges import build_schedule, estimate_c, finite_cut_edges, segment_cut_counts
from walklocus.estimators import localize
from walklocus.harness import ExperimentConfig, run_diameter_growth, run_experiment
from walklocus.lattice import generate_walk
from walklocus.lattice import rng_stream
from walklocus.trace import build_trace

T0 = time.time()


def stamp(label, value):
    print(f"[{time.time() - T0:7.1f}s] {label}: {value}", flush=True)


# criterion 9 clause 3: psi on Z^1 rates at n in {256, 1024, 4096}
for n in (256, 1024, 4096):
    r = run_experiment(
        ExperimentConfig(dimension=1, estimator="psi", replicates=2000, seed=11, steps=n)
    )
    stamp(f"psi d1 n={n} (2000)", f"est={r.estimate:.4f} succ={r.successes}")

# criterion 6/7: psi d=5 and d=10 at n=4096, per-rep cost
for d, reps in ((5, 300), (10, 300)):
    t0 = time.time()
    r = run_experiment(
        ExperimentConfig(dimension=d, estimator="psi", replicates=reps, seed=11, steps=4096)
    )
    stamp(
        f"psi d{d} n=4096 ({reps})",
        f"est={r.estimate:.4f} unstable={r.extra['unstable']} "
        f"{(time.time() - t0) / reps * 1e3:.1f}ms/rep",
    )

# criterion 6: growth event rate at d=5 n=4096
t0 = time.time()
g = run_diameter_growth(
    ExperimentConfig(dimension=5, estimator=None, replicates=300, seed=11, steps=4096)
)
stamp("growth d5 n=4096 (300)", f"est={g.estimate:.4f} {(time.time() - t0) / 300 * 1e3:.1f}ms/rep")

# criterion 11: gamma d=5 steps=1e4; psi range |V|=2048; psi vertex n=4096
t0 = time.time()
r = run_experiment(
    ExperimentConfig(dimension=5, estimator="gamma", replicates=40, seed=11, steps=10**4)
)
stamp(
    "gamma d5 n=1e4 (40)",
    f"est={r.estimate:.4f} fail={r.failures} {(time.time() - t0) / 40 * 1e3:.0f}ms/rep",
)
t0 = time.time()
r = run_experiment(
    ExperimentConfig(
        dimension=5, estimator="psi", replicates=200, seed=11,
        range_target=2048, trace="range", budget=1 << 15,
    )
)
stamp(
    "psi range |V|=2048 (200)",
    f"est={r.estimate:.4f} fail={r.failures} {(time.time() - t0) / 200 * 1e3:.1f}ms/rep",
)
t0 = time.time()
r = run_experiment(
    ExperimentConfig(
        dimension=5, estimator="psi", replicates=200, seed=11, steps=4096, trace="vertex"
    )
)
stamp(
    "psi vertex n=4096 (200)",
    f"est={r.estimate:.4f} fail={r.failures} {(time.time() - t0) / 200 * 1e3:.1f}ms/rep",
)

# criterion 9 clauses 1-2: coupling frequency and psi-on-coupled-trace
for k in (2, 4, 8):
    starts = default_starts(1, k)
    coupled = 0
    per_start = np.zeros(k, dtype=np.int64)
    reps = 300
    t0 = time.time()
    for rep in range(reps):
        out = couple_walks(1, starts, 1024, rng_stream(21, rep))
        if not traces_coincide(out.walks()):
            continue
        coupled += 1
        g = build_trace(out.reference)
        for i, s in enumerate(starts):
            res = localize(g, "psi", rng_stream(21, rep, 1 + i), truth=s)
            per_start[i] += 1 if res.success else 0
    stamp(
        f"couple d1 k={k} n=1024 (300)",
        f"coupled={coupled} per_start_avg={per_start.mean() / max(1, coupled):.4f} "
        f"bound={3 / k:.3f} {(time.time() - t0) / reps * 1e3:.1f}ms/rep",
    )

# criterion 10: A_m frequency, trend in m, containment with lambda_k
c_ref = 0.638
m0 = -(-8 // c_ref) if False else int(np.ceil(8 / c_ref)) * 4
stamp("criterion 10 m0", m0)
n10 = 1 << 14
for m in (m0 // 2, m0, 2 * m0):
    sched = build_schedule(m, c_ref, horizon=n10)
    k_lam = 2 * int(np.floor(2 * m * (2 / c_ref + 1)))
    hit = 0
    contained = 0
    reps = 120
    t0 = time.time()
    for rep in range(reps):
        walk = generate_walk(5, n10, 31, stream_path=(rep,))
        counts = segment_cut_counts(finite_cut_edges(walk), sched)
        if not counts.event_a:
            continue
        hit += 1
        res = localize(
            build_trace(walk), f"lambda:{k_lam}", rng_stream(31, rep, 1), truth=walk.start
        )
        contained += 1 if res.success else 0
    stamp(
        f"A_m m={m} k_lam={k_lam} (120)",
        f"freq={hit / reps:.3f} contained={contained}/{hit} "
        f"{(time.time() - t0) / reps * 1e3:.0f}ms/rep",
    )

stamp("total", "done")
