
import numpy as np
import pytest
from hypothesis import given, strategies as st

from quiltsim import io
from quiltsim.measures import PairwiseTangleMatrix
from quiltsim.oracle import run_oracle
from quiltsim.recurrence import simulate
from quiltsim.schemes import (CollisionEvent, ConcurrentGroups, OldPairBlock, Scheme,
                              SimultaneousCollision, Superposed, build_random,
                              build_thermalization, build_uniform_quilt)


def _random_tangles(rng, n):
    a = rng.random((n, n)) ** 8
    a = np.triu(a, 1)
    return PairwiseTangleMatrix(a + a.T)


def test_csv_round_trip_exact(tmp_path, rng):
    m = _random_tangles(rng, 7)
    path = io.export_tangle_csv(m, tmp_path / "t.csv")
    back = io.read_tangle_csv(path)
    assert np.array_equal(back.values, m.values)
    lines = path.read_text().splitlines()
    assert len(lines) == 7 and all(len(line.split(",")) == 7 for line in lines)


def test_csv_rejects_invalid(tmp_path):
    (tmp_path / "bad.csv").write_text("0,0.5\n0.2,0\n")
    with pytest.raises(ValueError):
        io.read_tangle_csv(tmp_path / "bad.csv")


def test_zero_matrix_heatmap_is_black(tmp_path):
    path = io.export_heatmap(PairwiseTangleMatrix.zeros(5), path=tmp_path / "z.ppm")
    px, maxval = io.read_ppm(path)
    assert maxval == 65535 and px.shape == (5, 5, 3)
    assert np.all(px == 0)


def test_uniform_quilt_heatmap_level(tmp_path):
    t = simulate(build_uniform_quilt(32)).tangles
    px, _ = io.read_ppm(io.export_heatmap(t, path=tmp_path / "u.ppm"))
    spec = io.HeatMapSpec()
    off = px[..., 0][~np.eye(32, dtype=bool)]
    assert np.unique(off).size == 1
    assert spec.invert(off[0]) == pytest.approx(-8.0, abs=1e-3)
    assert np.all(np.diag(px[..., 0]) == 0)
    assert np.all(px[..., 0] == px[..., 1]) and np.all(px[..., 1] == px[..., 2])


def test_heatmap_round_trip_within_quantization(tmp_path, rng):
    m = _random_tangles(rng, 6)
    io.export_tangle_csv(m, tmp_path / "m.csv")
    again = io.read_tangle_csv(tmp_path / "m.csv")
    spec = io.HeatMapSpec()
    px, _ = io.read_ppm(io.export_heatmap(again, spec, tmp_path / "m.ppm"))
    logs = spec.transform(m.values)
    step = -spec.floor / spec.maxval
    assert np.max(np.abs(spec.invert(px[..., 0]) - logs)) <= step / 2 + 1e-12


@given(st.lists(st.floats(0, 1), min_size=2, max_size=40))
def test_heatmap_monotone_and_ties(values):
    spec = io.HeatMapSpec()
    v = np.array(values)
    lv = spec.levels(v)
    order = np.argsort(v, kind="stable")
    assert np.all(np.diff(lv[order]) >= 0)
    for i in range(len(v)):
        for j in range(len(v)):
            if v[i] == v[j]:
                assert lv[i] == lv[j]


def test_heatmap_floor_and_8bit(tmp_path):
    spec = io.HeatMapSpec(floor=-10, maxval=255)
    assert spec.levels(np.array([0.0, 2.0 ** -20, 2.0 ** -10, 1.0])).tolist() == [0, 0, 0, 255]
    m = PairwiseTangleMatrix(np.array([[0, 0.5], [0.5, 0]]))
    px, maxval = io.read_ppm(io.export_heatmap(m, spec, tmp_path / "s.ppm"))
    assert maxval == 255 and px[0, 1, 0] == round(9 / 10 * 255)
    with pytest.raises(ValueError):
        io.HeatMapSpec(floor=0.0)
    with pytest.raises(ValueError):
        io.HeatMapSpec(maxval=70000)
    with pytest.raises(ValueError):
        io.export_heatmap(m)


def test_read_ppm_with_comment(tmp_path):
    data = b"P6\n# made by hand\n2 1\n255\n" + bytes([1, 1, 1, 9, 9, 9])
    (tmp_path / "c.ppm").write_bytes(data)
    px, maxval = io.read_ppm(tmp_path / "c.ppm")
    assert maxval == 255 and px[0, 1].tolist() == [9, 9, 9]
    (tmp_path / "p3.ppm").write_bytes(b"P3\n1 1\n255\n0 0 0\n")
    with pytest.raises(ValueError):
        io.read_ppm(tmp_path / "p3.ppm")


def test_event_parser():
    text = """
    # chain with one xy step
    0 1 ee 1.0 0.785
    1 2 xy 0.5 0.3 0.25   # trailing comment
    group 2 3,4 1,2 0.4
    """
    evs = io.parse_events(text)
    assert evs[0] == CollisionEvent(0, 1, 1.0, 0.785)
    assert evs[1] == CollisionEvent(1, 2, 0.5, 0.3, "xy", 0.25)
    assert evs[2] == SimultaneousCollision(2, (3, 4), (1.0, 2.0), 0.4)
    assert io.parse_events(io.format_events(evs)) == evs
    for bad in ["0 1 ee 1.0", "0 1 zz 1 1", "group 0 1,2 1 0.3", "0 0 ee 1 1", "a b ee 1 1"]:
        with pytest.raises(ValueError, match="line 1"):
            io.parse_events(bad)


def test_format_events_expands_blocks():
    blk = OldPairBlock([0, 1], [1, 2], [1.0, 1.0], [0.1, 0.2])
    assert len(io.parse_events(io.format_events([blk]))) == 2
    g = SimultaneousCollision(0, (1,), (1.0,))
    with pytest.raises(TypeError):
        io.format_events([ConcurrentGroups(g, SimultaneousCollision(2, (3,), (1.0,)))])


def test_scheme_record_round_trip():
    g1 = SimultaneousCollision(0, (2,), (1.0,), 0.5)
    g2 = SimultaneousCollision(1, (3,), (0.7,), 0.5)
    schemes = [
        build_random(8, 0.9, 0.4, seed=3, kind="xy", theta=0.2, omega=[1, 2, 3, 4, 5, 6, 7, 8]),
        build_thermalization(5, 1.0, 10, seed=1),
        Scheme(4, [CollisionEvent(0, 1), ConcurrentGroups(g1, g2)], excited=(),
               superposed=(Superposed(0, 0.3, 0.2),)),
    ]
    for s in schemes:
        back = io.scheme_from_record(io.scheme_record(s))
        assert back.n_qubits == s.n_qubits and back.excited == s.excited
        assert back.frequencies == s.frequencies and back.superposed == s.superposed
        np.testing.assert_array_equal(run_oracle(back).tangles.values, run_oracle(s).tangles.values)
    with pytest.raises(ValueError):
        io.event_from_record({"type": "teleport"})


def test_config_round_trip_and_errors(tmp_path):
    path = io.write_config({"scheme": "chain", "n": 5, "t": 0.3, "seed": None}, tmp_path / "a.ini")
    cfg = io.read_config(path)
    assert cfg == {"scheme": "chain", "n": "5", "t": "0.3"}
    (tmp_path / "nosec.ini").write_text("[other]\nn = 3\n")
    (tmp_path / "nover.ini").write_text("[run]\nn = 3\n")
    (tmp_path / "ver.ini").write_text("[run]\nschema_version = 2\nn = 3\n")
    (tmp_path / "key.ini").write_text("[run]\nschema_version = 1\nqubits = 3\n")
    (tmp_path / "junk.ini").write_text("n = 3\n")
    for name in ("nosec", "nover", "ver", "key"):
        with pytest.raises(ValueError):
            io.read_config(tmp_path / f"{name}.ini")
    with pytest.raises(Exception):
        io.read_config(tmp_path / "junk.ini")


def test_manifest_contents(tmp_path):
    s = build_random(5, seed=2)
    rec = io.build_manifest(s, engine="analytic", config={"n": "5"}, outputs={},
                            wall_time=0.1)
    io.write_manifest(rec, tmp_path / "m.json")
    back = io.read_manifest(tmp_path / "m.json")
    assert back["seed"] == 2 and back["heatmap_floor"] == io.DEFAULT_FLOOR
    assert len(back["scheme"]["events"]) == 4
    ev = back["scheme"]["events"][0]
    assert set(ev) >= {"qubits", "t", "coupling"}
    (tmp_path / "old.json").write_text('{"schema_version": 0}')
    with pytest.raises(ValueError):
        io.read_manifest(tmp_path / "old.json")
