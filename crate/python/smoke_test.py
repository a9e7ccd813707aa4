"""Smoke test for the epi3_py extension.

Build and install first:
    pip install maturin
    maturin develop -m crates/python/Cargo.toml   (inside a virtualenv)
or  maturin build -m crates/python/Cargo.toml && pip install target/wheels/epi3-*.whl
"""

import math
import os
import sys
import tempfile

import epi3_py as epi3


def main() -> int:
    assert epi3.VARIANTS == ["v1", "v2", "v3", "v4", "tpc"], epi3.VARIANTS

    zero = [0] * 27
    assert epi3.k2(zero, zero) == 0.0
    one = [1] + [0] * 26
    assert abs(epi3.k2(one, zero) - math.log(2)) < 1e-9
    assert epi3.block_params() == (5, 400)
    assert epi3.block_params(32, 8, 7, 1) == (5, 96)

    ds = epi3.Dataset.synthetic(16, 1500, 0.3, 4, ((3, 8, 12), (1, 1, 1), 0.9, 0.1))
    assert ds.num_snps == 16 and ds.num_samples == 1500
    assert sum(ds.class_counts) == 1500

    oracle = epi3.oracle_search(ds, top_k=3)
    assert oracle.best[0] == [3, 8, 12], oracle
    for variant in epi3.VARIANTS:
        r = epi3.search(ds, variant=variant, threads=2, top_k=3)
        assert r.best[0] == oracle.best[0], (variant, r)
        assert abs(r.best[1] - oracle.best[1]) < 1e-9
        assert r.combinations_evaluated == 16 * 15 * 14 // 6

    want = epi3.frequency_table(ds, [0, 5, 9], "oracle")
    for method in epi3.VARIANTS:
        assert epi3.frequency_table(ds, [0, 5, 9], method) == want, method
    controls, cases = want
    assert (sum(controls), sum(cases)) == ds.class_counts

    with tempfile.TemporaryDirectory() as d:
        for packed in (False, True):
            path = os.path.join(d, "ds.bin" if packed else "ds.txt")
            ds.save(path, packed=packed)
            back = epi3.Dataset.load(path)
            assert back.class_counts == ds.class_counts
            assert epi3.search(back, top_k=1).best == epi3.search(ds, top_k=1).best

    small = epi3.Dataset([[0, 1, 2], [0, 0, 0], [2, 2, 1]], [0, 1, 1])
    assert small.genotype(0, 2) == 2
    assert small.phenotype() == [0, 1, 1]

    for bad in (lambda: epi3.Dataset([[0, 3, 1]] * 3, [0, 1, 0]),
                lambda: epi3.search(ds, variant="v9"),
                lambda: epi3.block_params(l1_kb=0)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")
    try:
        epi3.frequency_table(ds, [3, 3, 4])
    except IndexError:
        pass
    else:
        raise AssertionError("expected IndexError")

    print("python smoke test: OK", repr(ds), oracle)
    return 0


if __name__ == "__main__":
    sys.exit(main())
