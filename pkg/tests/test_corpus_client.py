from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

import corpusgen
from argrel.corpus_client import (
    CorpusRef,
    compute_digest,
    fetch_corpus,
    load_local,
    MANIFEST_NAME,
)
from argrel.errors import CacheCorrupt, MalformedJson, NetworkError

DOC_A = corpusgen.simple_doc([("n1", "first statement", "I")], [])
DOC_B = corpusgen.simple_doc([("n1", "second statement", "I")], [])
DOC_C = corpusgen.simple_doc([("n1", "third statement", "I")], [])


class _StubCorpusServer:
    """Serves /test/index.json plus one file per map, counting requests."""

    def __init__(self, corpus_id: str, docs: dict[str, str]):
        routes = {f"/{corpus_id}/index.json": json.dumps({"corpus_id": corpus_id, "maps": sorted(docs)})}
        for map_id, text in docs.items():
            routes[f"/{corpus_id}/{map_id}.json"] = text
        self.requests: list[str] = []
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                outer.requests.append(self.path)
                body = routes.get(self.path)
                if body is None:
                    self.send_response(404)
                    self.end_headers()
                    return
                data = body.encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def base_url(self) -> str:
        host, port = self.server.server_address
        return f"http://{host}:{port}"

    def stop(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def stub_server():
    server = _StubCorpusServer("test", {"mapA": DOC_A, "mapB": DOC_B, "mapC": DOC_C})
    yield server
    server.stop()


def _ref(server, corpus_id="test"):
    return CorpusRef(corpus_id=corpus_id, base_url=f"{server.base_url}/{corpus_id}")


class TestLoadLocal:
    def test_three_files(self, tmp_path):
        for name, doc in (("a", DOC_A), ("b", DOC_B), ("c", DOC_C)):
            (tmp_path / f"{name}.json").write_text(doc, encoding="utf-8")
        snap = load_local(tmp_path, "local")
        assert snap.map_ids() == ["a", "b", "c"]
        assert snap.corpus_id == "local"

    def test_empty_directory(self, tmp_path):
        snap = load_local(tmp_path, "empty")
        assert snap.maps == ()

    def test_unparseable_file_named(self, tmp_path):
        (tmp_path / "good.json").write_text(DOC_A, encoding="utf-8")
        (tmp_path / "bad.json").write_text("{nope", encoding="utf-8")
        with pytest.raises(MalformedJson) as exc:
            load_local(tmp_path, "local")
        assert "bad.json" in str(exc.value)


class TestDigest:
    def test_identical_bytes_identical_digest(self, tmp_path):
        maps = [("m1", DOC_A.encode()), ("m2", DOC_B.encode())]
        assert compute_digest(maps) == compute_digest(list(maps))

    def test_any_byte_change_changes_digest(self):
        maps = [("m1", DOC_A.encode())]
        altered = [("m1", DOC_A.encode() + b" ")]
        assert compute_digest(maps) != compute_digest(altered)
        renamed = [("m2", DOC_A.encode())]
        assert compute_digest(maps) != compute_digest(renamed)

    def test_local_and_cache_digest_agree(self, tmp_path, stub_server):
        snap_fetch = fetch_corpus(_ref(stub_server), tmp_path / "cache", delay_seconds=0)
        local_dir = tmp_path / "local"
        local_dir.mkdir()
        for map_id, data in snap_fetch.maps:
            (local_dir / f"{map_id}.json").write_bytes(data)
        snap_local = load_local(local_dir, "test")
        assert snap_local.content_digest == snap_fetch.content_digest


class TestFetch:
    def test_cold_fetch_populates_cache(self, tmp_path, stub_server):
        cache = tmp_path / "cache"
        snap = fetch_corpus(_ref(stub_server), cache, delay_seconds=0)
        assert snap.map_ids() == ["mapA", "mapB", "mapC"]
        corpus_dir = cache / "test"
        assert (corpus_dir / MANIFEST_NAME).exists()
        # verbatim bytes on disk
        assert (corpus_dir / "mapA.json").read_text(encoding="utf-8") == DOC_A
        assert len(stub_server.requests) == 4  # index + 3 maps

    def test_warm_cache_zero_requests(self, tmp_path, stub_server):
        cache = tmp_path / "cache"
        first = fetch_corpus(_ref(stub_server), cache, delay_seconds=0)
        before = len(stub_server.requests)
        second = fetch_corpus(_ref(stub_server), cache, delay_seconds=0)
        assert len(stub_server.requests) == before
        assert second == first  # retrieved_at excluded from equality

    def test_partial_cache_fetches_only_missing(self, tmp_path, stub_server):
        cache = tmp_path / "cache"
        fetch_corpus(_ref(stub_server), cache, delay_seconds=0)
        # drop the manifest and one file: the next fetch re-lists and
        # downloads only the missing map
        (cache / "test" / MANIFEST_NAME).unlink()
        (cache / "test" / "mapB.json").unlink()
        stub_server.requests.clear()
        snap = fetch_corpus(_ref(stub_server), cache, delay_seconds=0)
        assert snap.map_ids() == ["mapA", "mapB", "mapC"]
        assert sorted(stub_server.requests) == ["/test/index.json", "/test/mapB.json"]

    def test_corrupt_cache_detected(self, tmp_path, stub_server):
        cache = tmp_path / "cache"
        fetch_corpus(_ref(stub_server), cache, delay_seconds=0)
        (cache / "test" / "mapB.json").write_text("tampered", encoding="utf-8")
        with pytest.raises(CacheCorrupt):
            fetch_corpus(_ref(stub_server), cache, delay_seconds=0)

    def test_missing_corpus_is_network_error(self, tmp_path, stub_server):
        ref = CorpusRef(corpus_id="nope", base_url=f"{stub_server.base_url}/nope")
        with pytest.raises(NetworkError) as exc:
            fetch_corpus(ref, tmp_path / "cache", delay_seconds=0)
        assert exc.value.status == 404

    def test_unreachable_server(self, tmp_path):
        ref = CorpusRef(corpus_id="x", base_url="http://127.0.0.1:1/x")
        with pytest.raises(NetworkError) as exc:
            fetch_corpus(ref, tmp_path / "cache", delay_seconds=0, timeout=0.5)
        assert exc.value.status is None

    def test_empty_corpus_listing(self, tmp_path):
        server = _StubCorpusServer("void", {})
        try:
            snap = fetch_corpus(_ref(server, "void"), tmp_path / "cache", delay_seconds=0)
            assert snap.maps == ()
            assert snap.content_digest == compute_digest([])
        finally:
            server.stop()

    def test_compiles_like_local_fixture(self, tmp_path, mini_dataset):
        """A fetched cache compiles to the same dataset as a local load."""
        docs = {
            p.stem: p.read_text(encoding="utf-8")
            for p in sorted(corpusgen.MINICORPUS_DIR.glob("*.json"))
        }
        server = _StubCorpusServer("minicorpus", docs)
        try:
            from argrel.pair_compiler import CompileConfig, compile_corpus

            snap = fetch_corpus(_ref(server, "minicorpus"), tmp_path / "cache", delay_seconds=0)
            ds = compile_corpus(snap, CompileConfig())
            assert ds.pairs == mini_dataset.pairs
        finally:
            server.stop()


class TestCorpusRef:
    def test_rejects_relative_url(self):
        with pytest.raises(ValueError):
            CorpusRef(corpus_id="x", base_url="corpora.aifdb.org/x")

    def test_rejects_empty_corpus_id(self):
        with pytest.raises(ValueError):
            CorpusRef(corpus_id="", base_url="http://example.org")
