"""Counter-based substreams: determinism and path separation."""

import numpy as np

from cbayes import streams


def test_substream_deterministic():
    a = streams.substream(7, streams.COEFFS, 3, 0).random(16)
    b = streams.substream(7, streams.COEFFS, 3, 0).random(16)
    assert np.array_equal(a, b)


def test_substream_paths_are_independent():
    base = streams.substream(7, streams.COEFFS, 3, 0).random(16)
    for path in [(streams.COEFFS, 3, 1), (streams.COEFFS, 4, 0),
                 (streams.SCALES, 3, 0), (streams.CHAIN, 3, 0)]:
        other = streams.substream(7, *path).random(16)
        assert not np.array_equal(base, other)


def test_substream_seed_separation():
    a = streams.substream(1, streams.DATA, 0).random(8)
    b = streams.substream(2, streams.DATA, 0).random(8)
    assert not np.array_equal(a, b)


def test_uniforms_in_unit_interval():
    gen = streams.substream(0, streams.PROBES, 0)
    u = streams.uniforms(gen, 10000)
    assert u.shape == (10000,)
    assert np.all(u >= 0.0) and np.all(u < 1.0)


def test_domain_constants_distinct():
    doms = [streams.COEFFS, streams.SCALES, streams.PROBES, streams.CHAIN, streams.DATA]
    assert len(set(doms)) == len(doms)
