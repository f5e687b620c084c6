import pytest

from sphergeo import SPH, Detection, FovBBox, fov_iou, nms, sph_iou

from conftest import random_box


def det(lon, lat, fh, fv, score, cat=1, img=1):
    return Detection(FovBBox(lon, lat, fh, fv), score, cat, img)


class TestBasics:
    def test_empty_input(self):
        assert nms([], 0.5) == []

    def test_duplicate_pair_keeps_higher_score(self):
        a = det(0, 0, 30, 30, 0.9)
        b = det(0, 0, 30, 30, 0.8)
        assert nms([b, a], 0.5) == [a]

    def test_disjoint_same_score_both_kept(self):
        a = det(0, 0, 20, 20, 0.7)
        b = det(90, 0, 20, 20, 0.7)
        assert nms([a, b], 0.5) == [a, b]

    def test_categories_do_not_suppress_each_other(self):
        a = det(0, 0, 30, 30, 0.9, cat=1)
        b = det(0, 0, 30, 30, 0.8, cat=2)
        assert nms([a, b], 0.5) == [a, b]

    def test_invalid_threshold(self):
        with pytest.raises(ValueError):
            nms([], 1.5)
        with pytest.raises(ValueError):
            nms([], -0.1)

    def test_score_validation(self):
        with pytest.raises(ValueError):
            det(0, 0, 10, 10, 1.2)

    def test_output_sorted_by_score(self, rng):
        dets = [det(rng.uniform(-180, 180), rng.uniform(-60, 60), 20, 20,
                    round(float(rng.uniform()), 6)) for _ in range(30)]
        kept = nms(dets, 0.4)
        scores = [d.score for d in kept]
        assert scores == sorted(scores, reverse=True)


class TestChain:
    def test_three_box_chain_keeps_ends(self):
        # Equal-size equator boxes offset by 10 deg have pairwise
        # fov_iou (40-d)/(40+d): A-B and B-C at 0.6, A-C at 1/3.
        a = det(0, 0, 40, 40, 0.9)
        b = det(10, 0, 40, 40, 0.8)
        c = det(20, 0, 40, 40, 0.7)
        assert abs(fov_iou(a.bbox, b.bbox) - 0.6) < 1e-12
        assert abs(fov_iou(b.bbox, c.bbox) - 0.6) < 1e-12
        assert fov_iou(a.bbox, c.bbox) < 0.5
        assert nms([a, b, c], 0.5) == [a, c]


class TestInvariants:
    def _random_dets(self, rng, n=40):
        return [Detection(random_box(rng, fov_range=(15, 50)),
                          round(float(rng.uniform()), 6),
                          int(rng.integers(1, 4)), 1) for _ in range(n)]

    def test_output_subset_and_no_overlap(self, rng):
        dets = self._random_dets(rng)
        kept = nms(dets, 0.5)
        assert all(k in dets for k in kept)
        for i, a in enumerate(kept):
            for b in kept[i + 1:]:
                if a.category_id == b.category_id:
                    assert fov_iou(a.bbox, b.bbox) <= 0.5

    def test_idempotent(self, rng):
        dets = self._random_dets(rng)
        once = nms(dets, 0.5)
        assert nms(once, 0.5) == once

    def test_threshold_one_keeps_everything(self, rng):
        dets = self._random_dets(rng, n=20)
        assert nms(dets, 1.0) == sorted(dets, key=lambda d: -d.score)

    def test_threshold_zero_keeps_one_per_overlap_class(self):
        cluster = [det(0, 0, 30, 30, 0.9), det(2, 1, 30, 30, 0.8),
                   det(-1, 2, 30, 30, 0.7)]
        far = det(120, 0, 30, 30, 0.6)
        kept = nms(cluster + [far], 0.0)
        assert kept == [cluster[0], far]


class TestMethodContrast:
    def test_high_latitude_duplicates_filtered_under_fov_only(self):
        # Same box shifted 10 deg in longitude at latitude 70: the raw
        # lon/lat overlap sits exactly at the 0.5 boundary and survives a
        # strict threshold, while the recentred overlap exceeds it.
        a = det(0, 70, 30, 30, 0.9)
        b = det(10, 70, 30, 30, 0.8)
        assert fov_iou(a.bbox, b.bbox) > 0.5
        assert sph_iou(a.bbox, b.bbox) <= 0.5
        assert nms([a, b], 0.5) == [a]
        assert nms([a, b], 0.5, method=SPH) == [a, b]
