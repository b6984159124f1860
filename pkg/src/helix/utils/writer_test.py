import hashlib
import json
from pathlib import Path

from helix.utils.writer import ResultWriter


class TestResultWriter:
    def test_csv(self, tmp_path: Path):
        writer = ResultWriter(tmp_path / "out")
        path = writer.write_csv("table.csv", {"grid_n": "192"}, ["l", "P_l"], [(0, 0.25), (1, 0.75)])
        assert path == tmp_path / "out" / "table.csv"
        assert path.read_text(encoding="utf-8") == "# grid_n: 192\nl,P_l\n0,0.25\n1,0.75\n"
        assert writer.written == [path]

    def test_digests(self, tmp_path: Path):
        writer = ResultWriter(tmp_path)
        first = writer.write_csv("a.csv", {}, ["l"], [(0,)])
        second = writer.write_text("b.yaml", "a: 1\n")
        assert first is not None
        assert writer.digests == {
            first: hashlib.sha256(b"l\n0\n").hexdigest(),
            second: hashlib.sha256(b"a: 1\n").hexdigest(),
        }

    def test_json(self, tmp_path: Path):
        writer = ResultWriter(tmp_path)
        path = writer.write_json("rho.json", {"fidelity": 0.5, "basis": ["|1,1>"]})
        assert path is not None
        assert json.loads(path.read_text(encoding="utf-8")) == {"fidelity": 0.5, "basis": ["|1,1>"]}

    def test_formats_filter(self, tmp_path: Path):
        writer = ResultWriter(tmp_path, ["json"])
        assert writer.write_csv("table.csv", {}, ["l"], [(0,)]) is None
        assert not (tmp_path / "table.csv").exists()
        # 文本片段不受格式过滤影响
        assert writer.write_text("fragment.yaml", "a: 1\n").exists()
        assert len(writer.written) == 1
