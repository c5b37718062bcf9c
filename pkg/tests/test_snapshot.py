import numpy as np
import pytest

from ism2d import (
    Constants,
    SnapshotFormatError,
    random_smooth,
    read_snapshot,
    write_snapshot,
)
from ism2d.snapshot import MAGIC

from conftest import grid_at


def make_state():
    g = grid_at(17)
    st = random_smooth(g, seed=42, amplitude=0.3, modes=2,
                       constants=Constants(1.5, 1.0, 9.8, 300.0))
    return st.replace(t=0.625)


class TestRoundTrip:
    def test_bit_exact(self, tmp_path):
        st = make_state()
        p1 = str(tmp_path / "a.ismsnap")
        p2 = str(tmp_path / "b.ismsnap")
        write_snapshot(p1, st)
        st2 = read_snapshot(p1)
        assert st2.t == st.t
        assert st2.constants == st.constants
        assert st2.grid == st.grid
        for a, b in ((st.u_S.x_comp, st2.u_S.x_comp),
                     (st.u_S.z_comp, st2.u_S.z_comp),
                     (st.u_T, st2.u_T), (st.theta_S, st2.theta_S)):
            assert a.data.tobytes() == b.data.tobytes()
        write_snapshot(p2, st2)
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_layout_x_fastest(self, tmp_path):
        # byte layout: flat index j*nx + i
        st = make_state()
        p = str(tmp_path / "c.ismsnap")
        write_snapshot(p, st)
        blob = open(p, "rb").read()
        g = st.grid
        off = len(MAGIC) + 8 + 7 * 8
        ux = np.frombuffer(blob, dtype="<f8", count=g.nx * g.nz, offset=off)
        i, j = 3, 5
        assert ux[j * g.nx + i] == st.u_S.x_comp.at(i, j)


class TestRejection:
    def test_bad_magic(self, tmp_path):
        st = make_state()
        p = str(tmp_path / "bad.ismsnap")
        write_snapshot(p, st)
        blob = bytearray(open(p, "rb").read())
        blob[:8] = b"NOTASNAP"
        open(p, "wb").write(bytes(blob))
        with pytest.raises(SnapshotFormatError):
            read_snapshot(p)

    def test_truncated(self, tmp_path):
        st = make_state()
        p = str(tmp_path / "trunc.ismsnap")
        write_snapshot(p, st)
        blob = open(p, "rb").read()
        open(p, "wb").write(blob[:-17])
        with pytest.raises(SnapshotFormatError):
            read_snapshot(p)

    def test_dimension_payload_mismatch(self, tmp_path):
        st = make_state()
        p = str(tmp_path / "dim.ismsnap")
        write_snapshot(p, st)
        blob = bytearray(open(p, "rb").read())
        # claim a larger grid than the payload carries
        import struct
        blob[8:12] = struct.pack("<I", st.grid.nx + 4)
        open(p, "wb").write(bytes(blob))
        with pytest.raises(SnapshotFormatError):
            read_snapshot(p)

    def test_undersized_grid_rejected(self, tmp_path):
        st = make_state()
        p = str(tmp_path / "tiny.ismsnap")
        write_snapshot(p, st)
        blob = bytearray(open(p, "rb").read())
        import struct
        blob[8:16] = struct.pack("<II", 4, 4)
        open(p, "wb").write(bytes(blob))
        with pytest.raises(SnapshotFormatError):
            read_snapshot(p)


def test_no_temp_files_left(tmp_path):
    st = make_state()
    for k in range(3):
        write_snapshot(str(tmp_path / f"s{k}.ismsnap"), st)
    leftovers = [p for p in tmp_path.iterdir() if p.name.startswith(".snap-")]
    assert not leftovers
