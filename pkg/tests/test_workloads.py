import io

import pytest

from predsched.errors import classify
from predsched.intervals import Interval, read_intervals, write_intervals
from predsched.rng import Xoshiro256
from predsched.workloads import (
    SwfFormatError,
    TraceJob,
    parse_swf,
    perturb,
    sample_instance,
    trace_stats,
)

I = Interval

SWF = """; Version: 2.2
; Computer: test
1 0 5 10 4 -1
2 3 -1 7 1
3 4 2 -1 1
4 10 0 3 2
   
5 12 1 8 1
"""


def synthetic_intervals(n, seed=0):
    g = Xoshiro256(seed)
    out = set()
    while len(out) < n:
        a = g.randbelow(500)
        out.add(I(a, a + 1 + g.randbelow(40)))
    return sorted(out)


def test_parse_basic():
    trace = parse_swf(io.StringIO("; header\n1 0 5 10 99\n"))
    assert [job.interval for job in trace.jobs] == [I(5, 15)]
    assert trace.skipped == 0


def test_parse_skips_and_counts():
    trace = parse_swf(io.StringIO(SWF))
    assert [job.job_id for job in trace.jobs] == [1, 4, 5]
    assert trace.skipped == 2
    assert trace.data_lines == 5
    stats = trace_stats(trace)
    assert stats["jobs"] == 3
    assert stats["max_length"] == 10
    assert stats["distinct_intervals"] == 3


def test_parse_negative_run_time():
    trace = parse_swf(io.StringIO("1 0 0 -1\n"))
    assert trace.jobs == [] and trace.skipped == 1


def test_parse_float_fields():
    trace = parse_swf(io.StringIO("1 2.0 3 4.0 1\n"))
    assert trace.jobs[0].interval == I(5, 9)


@pytest.mark.parametrize("text, lineno", [
    ("; c\n1 2 3\n", 2),
    ("1 0 x 3\n", 1),
    ("1 0 0 3\n2 0 0 2.5\n", 2),
])
def test_parse_malformed(text, lineno):
    with pytest.raises(SwfFormatError) as info:
        parse_swf(io.StringIO(text))
    assert info.value.lineno == lineno
    assert f"line {lineno}" in str(info.value)


def test_parse_empty():
    assert parse_swf(io.StringIO("")).jobs == []


def test_roundtrip_through_interval_file():
    trace = parse_swf(io.StringIO(SWF))
    buf = io.StringIO()
    write_intervals([job.interval for job in trace.jobs], buf)
    assert read_intervals(io.StringIO(buf.getvalue())) == [job.interval for job in trace.jobs]


def test_sample_two():
    inst = sample_instance([I(0, 1), I(1, 2)], seed=3)
    assert inst.n == 1
    assert len(inst.holdout_pool) == 1
    assert inst.input_set.isdisjoint(inst.holdout_pool)


def test_sample_needs_two():
    with pytest.raises(ValueError):
        sample_instance([I(0, 1), I(0, 1)], seed=0)


def test_sample_deterministic_and_partitioning():
    ivs = synthetic_intervals(101)
    a = sample_instance(ivs, seed=11)
    assert a == sample_instance(ivs, seed=11)
    assert a != sample_instance(ivs, seed=12)
    assert a.n == 50
    assert a.input_set.isdisjoint(a.holdout_pool)
    assert a.input_set | set(a.holdout_pool) == set(ivs)


def test_sample_from_jobs_dedupes():
    jobs = [TraceJob(k, 0, 0, 1 + k % 3) for k in range(9)]
    inst = sample_instance(jobs, seed=0)
    assert inst.n + len(inst.holdout_pool) == 3


def test_sample_n_for_large_trace():
    assert sample_instance(synthetic_intervals(13225), seed=0).n == 6612


@pytest.fixture(scope="module")
def instance():
    return sample_instance(synthetic_intervals(200, seed=1), seed=4)


def test_perturb_zero(instance):
    pred = perturb(instance, 0, seed=1)
    assert pred == instance.input_set
    assert classify(instance.input_order, pred).eta == 0


def test_perturb_balanced_full(instance):
    pred = perturb(instance, instance.n, seed=1)
    assert len(pred) == instance.n
    assert pred.isdisjoint(instance.input_set)


@pytest.mark.parametrize("d", [1, 17, 100])
def test_perturb_variants(instance, d):
    balanced = perturb(instance, d, seed=2)
    assert len(balanced) == instance.n
    assert len(balanced - instance.input_set) == d
    fn_only = perturb(instance, d, seed=2, variant="fn_only")
    assert fn_only <= instance.input_set and len(fn_only) == instance.n - d
    fp_only = perturb(instance, d, seed=2, variant="fp_only")
    assert fp_only >= instance.input_set and len(fp_only) == instance.n + d


def test_perturb_fn_only_full_is_empty(instance):
    assert perturb(instance, instance.n, seed=0, variant="fn_only") == frozenset()


def test_perturb_deterministic(instance):
    assert perturb(instance, 30, seed=9) == perturb(instance, 30, seed=9)
    assert perturb(instance, 30, seed=9) != perturb(instance, 30, seed=10)


@pytest.mark.parametrize("d, variant", [(-1, "balanced"), (101, "fn_only"), (5, "sideways")])
def test_perturb_ranges(instance, d, variant):
    with pytest.raises(ValueError):
        perturb(instance, d, seed=0, variant=variant)
