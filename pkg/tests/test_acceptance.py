"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s``.  The two tests that need
the UCI white wine-quality file skip when it cannot be found or downloaded
(see tests/conftest.py); scripts/fetch_wine.py fetches it where network
access exists.
"""

import itertools
import random
from dataclasses import replace

from bitmedian import cli
from bitmedian.bitplane import build_bitplanes, median, rank_select
from bitmedian.clustering import ClusterConfig, run
from bitmedian.fixedpoint import FixedPointCodec, codec_for_values, decode, encode
from bitmedian.ingest import encode_dataset, parse, summary_stats
from bitmedian.pimsim import TileConfig, partition, simulated_rank_select

from oracles import bits_of


# ------------------------------------------------------------------ 1


def test_median_oracle_equivalence_exhaustive():
    """rank_select == sort-based order statistic for every matrix with
    N <= 7, W <= 4, every mask, every rank.

    Two passes split the space.  A literal pass enumerates every bit
    pattern x mask x rank where that is tractable (N*W <= 12).  Masked-out
    rows never enter the counts (the literal pass re-proves that across all
    masks), so a (matrix, mask, rank) case is exactly a (masked-in
    multiset, rank) case; the second pass enumerates every multiset of
    size <= 7 over W <= 4 bit words with every rank, covering all the
    remaining sizes exactly.
    """
    literal = 0
    for n, w in itertools.product(range(1, 8), range(1, 5)):
        if n * w > 12:
            continue
        wmask = (1 << w) - 1
        for packed in range(1 << (n * w)):
            values = [(packed >> (w * i)) & wmask for i in range(n)]
            m = build_bitplanes(values, w)
            for mask in range(1, 1 << n):
                sub = sorted(values[i] for i in range(n) if (mask >> i) & 1)
                for rank in range(1, len(sub) + 1):
                    assert rank_select(m, rank, mask) == sub[rank - 1]
                    literal += 1

    multisets = 0
    for w in range(1, 5):
        words = range(1 << w)
        for n in range(1, 8):
            for combo in itertools.combinations_with_replacement(words, n):
                m = build_bitplanes(combo, w)
                for rank in range(1, n + 1):
                    assert rank_select(m, rank) == combo[rank - 1]
                    multisets += 1

    print(
        f"\nACCEPTANCE PASS: exhaustive oracle equivalence "
        f"({literal} literal matrix/mask/rank cases, "
        f"{multisets} multiset/rank cases, exact)"
    )


# ------------------------------------------------------------------ 2


def test_median_oracle_equivalence_randomized():
    """10^5 random (matrix, mask) median instances at W=64, N up to 1001,
    odd and even, each equal to the sort oracle's lower median.  Exact."""
    rng = random.Random(20260808)
    checks = 0
    parities = set()
    for _ in range(100):
        n = rng.randrange(1, 1002)
        parities.add(n % 2)
        values = [rng.getrandbits(64) for _ in range(n)]
        m = build_bitplanes(values, 64)
        for _ in range(1000):
            mask = rng.getrandbits(n)
            if mask == 0:
                mask = 1 << rng.randrange(n)
            sub = [values[i] for i in bits_of(mask, n)]
            got = median(m, mask)
            sub.sort()
            assert got == sub[(len(sub) + 1) // 2 - 1]
            checks += 1
    assert checks == 100_000
    assert parities == {0, 1}
    print(f"\nACCEPTANCE PASS: randomized oracle equivalence ({checks} cases, exact)")


# ------------------------------------------------------------------ 3


def test_tiling_transparency():
    """simulated_rank_select == rank_select on 10^4 random
    (matrix, mask, rank, TileConfig) cases.  Exact."""
    rng = random.Random(97)
    cases = 0
    while cases < 10_000:
        n = rng.randrange(1, 241)
        w = rng.randrange(1, 65)
        values = [rng.getrandbits(w) for _ in range(n)]
        m = build_bitplanes(values, w)
        for _ in range(min(10, 10_000 - cases)):
            mask = rng.getrandbits(n)
            if mask == 0:
                mask = 1 << rng.randrange(n)
            rank = rng.randrange(1, mask.bit_count() + 1)
            r = rng.randrange(1, n + 16)
            cfg = TileConfig(
                rows_per_array=r,
                group_size=rng.randrange(1, r + 1),
                tree_fanin=rng.randrange(2, 6),
            )
            word, _ = simulated_rank_select(partition(m, cfg), rank, mask)
            assert word == rank_select(m, rank, mask)
            cases += 1
    print(f"\nACCEPTANCE PASS: tiling transparency ({cases} cases, exact)")


# ------------------------------------------------------------------ 4


def test_engine_equivalent_clustering_on_wine(wine_white_path):
    """k-medians with the simulated engine reproduces the reference engine
    bit-exactly on the wine dataset, k in {2,3,5}, seeds {1,2,3}: identical
    traces, assignments, centroids.  (Iterations capped at 12 per run to
    bound runtime; both engines run under the same cap.)"""
    ds = encode_dataset(parse(wine_white_path))
    data = ds.encoded
    runs = 0
    for k in (2, 3, 5):
        for seed in (1, 2, 3):
            base = ClusterConfig(
                k=k,
                seed=seed,
                centroid_mode="median",
                width=ds.codec.width,
                max_iters=12,
            )
            ref = run(data, base)
            sim = run(data, replace(base, engine="simulated"))
            assert ref.trace == sim.trace, (k, seed)
            assert ref.assignments == sim.assignments, (k, seed)
            assert ref.centroids == sim.centroids, (k, seed)
            assert ref.iterations_run == sim.iterations_run, (k, seed)
            assert sim.ledger is not None and sim.ledger.bits_moved > 0
            runs += 1
    print(
        f"\nACCEPTANCE PASS: engine-equivalent clustering on wine "
        f"({runs} (k, seed) pairs, bit-exact)"
    )


# ------------------------------------------------------------------ 5


def test_objective_monotonicity():
    """On 100 random datasets (n <= 500, d <= 8), the per-iteration
    objective never increases beyond the rounding slack, in both modes.

    The stated slack is k*d*2^(-2f) (mean/squared-Euclidean) and
    k*d*2^(-f) (median/L1) in decoded units; the word-domain objective
    scales by 2^(2f) and 2^f respectively, so both become k*d words."""
    rng = random.Random(5150)
    datasets = 0
    for trial in range(100):
        n = rng.randrange(8, 501)
        d = rng.randrange(1, 9)
        rows = [[rng.uniform(0, 1000) for _ in range(d)] for _ in range(n)]
        codec = codec_for_values([v for row in rows for v in row], width=16)
        data = [tuple(encode(v, codec) for v in row) for row in rows]
        k = min(n, rng.randrange(1, 9))
        for mode in ("mean", "median"):
            cfg = ClusterConfig(
                k=k, seed=trial, centroid_mode=mode, width=16, max_iters=30
            )
            model = run(data, cfg)
            slack = k * d
            objs = [t.objective for t in model.trace]
            for before, after in zip(objs, objs[1:]):
                assert after <= before + slack, (trial, mode)
        datasets += 1
    print(
        f"\nACCEPTANCE PASS: objective monotonicity "
        f"({datasets} datasets x 2 modes, within k*d rounding slack)"
    )


# ------------------------------------------------------------------ 6


def test_statistics_reproduction_on_wine(wine_white_path):
    """Summary statistics of the public white-wine file match the reference
    values: fixed acidity mean 6.8548 +-0.01, std.dev 0.8439 +-0.01, median
    6.8 exact, coef.var 0.1231 +-0.002.  The public file has 4898 rows (the
    reference table reports 4595; its exact input file is unrecoverable, so
    the row count is documented here rather than matched)."""
    ds = parse(wine_white_path)
    stats = {s.name: s for s in summary_stats(ds)}
    fa = stats["fixed acidity"]
    assert fa.nbr_val == 4898
    assert abs(fa.mean - 6.8548) <= 0.01
    assert abs(fa.std_dev - 0.8439) <= 0.01
    assert fa.median == 6.8
    assert abs(fa.coef_var - 0.1231) <= 0.002
    print(
        "\nACCEPTANCE PASS: statistics reproduction on wine "
        f"(mean {fa.mean:.4f}, std.dev {fa.std_dev:.4f}, median {fa.median}, "
        f"coef.var {fa.coef_var:.4f}, nbr.val {fa.nbr_val})"
    )


# ------------------------------------------------------------------ 7


def test_outlier_robustness_of_median_centroid():
    """k=1 over {1, 2, 3, 100}: the median centroid is 2 while the mean
    centroid is dragged to 26.5."""
    codec = FixedPointCodec(width=16, frac_bits=1)
    data = [(encode(v, codec),) for v in (1.0, 2.0, 3.0, 100.0)]
    med = run(data, ClusterConfig(k=1, centroid_mode="median", width=16))
    mean = run(data, ClusterConfig(k=1, centroid_mode="mean", width=16))
    med_c = decode(med.centroids[0][0], codec)
    mean_c = decode(mean.centroids[0][0], codec)
    assert med_c == 2.0
    assert mean_c == 26.5
    print(
        f"\nACCEPTANCE PASS: outlier robustness (median centroid {med_c}, "
        f"mean centroid {mean_c})"
    )


# ------------------------------------------------------------------ 8


def test_cost_report_in_situ_beats_streaming(tmp_path, capsys, monkeypatch):
    """Substitute for the reference hardware speedup claims (which carry no
    reproducible workload definition): under the default tile config the
    cost report shows bits_moved/host_bits_moved < 1 for every selection
    with N >= 512, with the model's formulas printed in the report."""
    monkeypatch.delenv(cli.ENV_TILE, raising=False)
    rng = random.Random(3)
    f = tmp_path / "synth.csv"
    f.write_text("v\n" + "\n".join(str(rng.uniform(0, 100)) for _ in range(4096)) + "\n")
    code = cli.main(
        [
            "cost-report",
            str(f),
            "--subsample",
            "512,1024,2048,4096",
            "--manifest",
            str(tmp_path / "m.json"),
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    lines = out.splitlines()
    formulas = [line for line in lines if line.startswith("#")]
    assert any("bits_moved" in line for line in formulas)
    assert any("host_bits_moved = N * W" in line for line in formulas)
    data_lines = [line for line in lines if line and not line.startswith("#")]
    ratios = {}
    for line in data_lines[1:]:
        fields = line.split(",")
        n, ratio = int(fields[0]), float(fields[-1])
        assert n >= 512
        assert ratio < 1.0
        ratios[n] = ratio
    assert set(ratios) == {512, 1024, 2048, 4096}
    print(
        "\nACCEPTANCE PASS: in-situ movement below streaming baseline "
        + ", ".join(f"N={n}: {r:.4f}" for n, r in sorted(ratios.items()))
    )
