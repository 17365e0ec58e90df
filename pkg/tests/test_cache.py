import json
from concurrent.futures import ThreadPoolExecutor

from semsim.cache import CacheKey, ScoreCache, canonical_text, config_digest
from semsim.types import Metric, MetricScore


def _key(metric="sts", fp="f1", a="hello there", b="general text", cfg="c1"):
    return CacheKey.build(metric, fp, a, b, cfg)


def _score(metric=Metric.STS):
    return MetricScore(pair_id="p1", metric=metric, score=0.7, raw=0.7, model_fingerprint="f1")


class TestCacheKey:
    def test_recomputation_is_identical(self):
        assert _key().digest == _key().digest
        assert len(_key().digest) == 64

    def test_every_field_changes_the_digest(self):
        base = _key()
        assert _key(metric="sbert").digest != base.digest
        assert _key(fp="f2").digest != base.digest
        assert _key(a="other text").digest != base.digest
        assert _key(b="other text").digest != base.digest
        assert _key(cfg="c2").digest != base.digest

    def test_nfc_normalization_unifies_encodings(self):
        composed = "café"
        decomposed = "café"
        assert canonical_text(composed) == canonical_text(decomposed)
        assert _key(a=composed).digest == _key(a=decomposed).digest

    def test_config_digest_is_order_insensitive(self):
        assert config_digest({"a": 1, "b": 2}) == config_digest({"b": 2, "a": 1})


class TestScoreCache:
    def test_get_on_empty_cache_is_none(self, tmp_path):
        assert ScoreCache(tmp_path).get(_key()) is None

    def test_put_then_get_round_trips(self, tmp_path):
        cache = ScoreCache(tmp_path)
        cache.put(_key(), _score())
        assert cache.get(_key()) == _score()

    def test_metric_is_part_of_the_key(self, tmp_path):
        cache = ScoreCache(tmp_path)
        cache.put(_key(metric="sts"), _score())
        assert cache.get(_key(metric="sbert")) is None

    def test_entry_is_single_record_json_with_exact_fields(self, tmp_path):
        cache = ScoreCache(tmp_path)
        key = _key()
        cache.put(key, _score())
        entry = tmp_path / key.digest[:2] / key.digest[2:4] / f"{key.digest}.json"
        record = json.loads(entry.read_text(encoding="utf-8"))
        assert set(record) == {"pair_id", "metric", "score", "raw", "model_fingerprint"}

    def test_corrupt_entry_is_discarded_as_miss(self, tmp_path):
        cache = ScoreCache(tmp_path)
        key = _key()
        cache.put(key, _score())
        entry = tmp_path / key.digest[:2] / key.digest[2:4] / f"{key.digest}.json"
        entry.write_text("{not json", encoding="utf-8")
        assert cache.get(key) is None
        assert not entry.exists()

    def test_no_temp_files_left_behind(self, tmp_path):
        cache = ScoreCache(tmp_path)
        for i in range(20):
            cache.put(_key(a=f"text {i}"), _score())
        leftovers = [p for p in tmp_path.rglob("*.tmp")]
        assert leftovers == []

    def test_concurrent_writers_and_readers(self, tmp_path):
        cache = ScoreCache(tmp_path)
        key = _key()

        def worker(i):
            cache.put(key, _score())
            return cache.get(key)

        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(worker, range(64)))
        assert all(r == _score() for r in results)
