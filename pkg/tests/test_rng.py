import numpy as np

from blockkmeans.rng import SplitMix64, mix64, mix64_array

from conftest import ref_mix, ref_splitmix64


def test_published_vectors():
    rng = SplitMix64(1234567)
    assert [rng.next_u64() for _ in range(5)] == [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
        4593380528125082431,
        16408922859458223821,
    ]


def test_matches_reference_for_several_seeds():
    for seed in (0, 1, 42, 2**64 - 1, 0xDEADBEEF):
        rng = SplitMix64(seed)
        assert [rng.next_u64() for _ in range(20)] == ref_splitmix64(seed, 20)


def test_stream_equals_scalar_outputs():
    a, b = SplitMix64(99), SplitMix64(99)
    assert a.stream(1000).tolist() == [b.next_u64() for _ in range(1000)]
    assert a.next_u64() == b.next_u64()


def test_mix_array_matches_scalar():
    values = [0, 1, 2**63, 2**64 - 1, 12345678901234567]
    arr = mix64_array(np.array(values, dtype=np.uint64))
    assert arr.tolist() == [mix64(v) for v in values] == [ref_mix(v) for v in values]


def test_uniform_uses_high_bits():
    rng, ref = SplitMix64(5), ref_splitmix64(5, 100)
    draws = [rng.uniform() for _ in range(100)]
    assert draws == [(v >> 11) / 2**53 for v in ref]
    assert all(0.0 <= d < 1.0 for d in draws)
