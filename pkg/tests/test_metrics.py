import numpy as np
import pytest

from oracles import det_oracle, eer_oracle, min_dcf_oracle
from svfront.metrics import (
    DcfParams,
    ScoreFileError,
    TrialScores,
    dcf_curve,
    det_points,
    eer,
    fuse_scores,
    min_dcf,
    parse_scores,
    read_scores,
    write_det_csv,
    write_scores,
)

TAR6, NON6 = [0.9, 0.4, 0.3], [0.8, 0.2, 0.1]
# enumerated by hand over the 7 threshold intervals
EER6, MINDCF6 = 1.0 / 3.0, 2.0 / 3.0


def six():
    return TrialScores.from_arrays(TAR6, NON6)


def random_sets(n_sets, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(n_sets):
        n = int(rng.integers(2, 51))
        n_tar = int(rng.integers(1, n))
        if rng.random() < 0.5:
            scores = rng.integers(0, 8, size=n).astype(float)  # plenty of ties
        else:
            scores = rng.normal(size=n)
        yield scores[:n_tar], scores[n_tar:]


def test_six_trial_fixture():
    t = six()
    assert eer(t) == EER6 == eer_oracle(TAR6, NON6)
    assert min_dcf(t) == MINDCF6 == min_dcf_oracle(TAR6, NON6)
    assert det_points(t).points() == det_oracle(TAR6, NON6)
    assert len(det_points(t)) == 7


def test_trivial_cases():
    assert eer(TrialScores.from_arrays([0.9, 0.8], [0.2, 0.1])) == 0.0
    assert min_dcf(TrialScores.from_arrays([0.9, 0.8], [0.2, 0.1])) == 0.0
    assert eer(TrialScores.from_arrays([1.0, 2.0, 2.0], [2.0, 1.0, 2.0])) == 0.5


def test_min_dcf_floor_is_one():
    # targets never outscore nontargets, so rejecting everything is optimal
    t = TrialScores.from_arrays([0.1], [0.9])
    assert min_dcf(t) == 1.0


def test_oracle_equivalence_random():
    for tar, non in random_sets(1000):
        t = TrialScores.from_arrays(tar, non)
        assert eer(t) == eer_oracle(list(tar), list(non))
        assert min_dcf(t) == min_dcf_oracle(list(tar), list(non))
        assert det_points(t).points() == det_oracle(list(tar), list(non))


def test_monotone_transform_invariance():
    for tar, non in random_sets(100, seed=1):
        a = TrialScores.from_arrays(tar, non)
        b = TrialScores.from_arrays(np.exp(tar / 4.0) * 3.0 - 1.0, np.exp(non / 4.0) * 3.0 - 1.0)
        assert eer(a) == eer(b) and min_dcf(a) == min_dcf(b)


def test_negation_symmetry():
    for tar, non in random_sets(100, seed=2):
        a = TrialScores.from_arrays(tar, non)
        b = TrialScores.from_arrays(-non, -tar)
        assert eer(a) == pytest.approx(eer(b), abs=1e-12)


def test_min_dcf_below_eer_point():
    p = DcfParams()
    for tar, non in random_sets(100, seed=3):
        t = TrialScores.from_arrays(tar, non)
        det = det_points(t)
        i = int(np.argmin(np.abs(det.p_fa - det.p_miss)))
        dcf_at = (p.p_target * det.p_miss[i] + (1 - p.p_target) * det.p_fa[i]) / p.p_target
        assert min_dcf(t, p) <= dcf_at + 1e-12


def test_det_shape():
    for tar, non in random_sets(50, seed=4):
        t = TrialScores.from_arrays(tar, non)
        det = det_points(t)
        assert len(det) == np.unique(t.scores).size + 1
        assert (det.p_fa[0], det.p_miss[0]) == (1.0, 0.0)
        assert (det.p_fa[-1], det.p_miss[-1]) == (0.0, 1.0)
        assert np.all(np.diff(det.p_fa) <= 0) and np.all(np.diff(det.p_miss) >= 0)


def test_dcf_curve_matches_det():
    vals, thr = dcf_curve(six())
    assert vals.size == thr.size == 7


def test_needs_both_classes():
    for t in (TrialScores.from_arrays([1.0], []), TrialScores.from_arrays([], [1.0])):
        for fn in (eer, min_dcf, det_points):
            with pytest.raises(ValueError):
                fn(t)


@pytest.mark.parametrize("kw", [dict(p_target=0.0), dict(p_target=1.0), dict(c_fa=0.0), dict(c_miss=-1.0)])
def test_dcf_params_validation(kw):
    with pytest.raises(ValueError):
        DcfParams(**kw)


def test_self_fusion_identity():
    t = six()
    f = fuse_scores([t, t])
    assert np.array_equal(f.scores, t.scores)
    assert eer(f) == eer(t) and min_dcf(f) == min_dcf(t)


def test_cancellation():
    t = six()
    neg = TrialScores(t.trial_ids, t.is_target, -t.scores)
    f = fuse_scores([t, neg])
    assert not f.scores.any() and eer(f) == 0.5


def test_three_system_fusion_means():
    base = six()
    s2 = TrialScores(base.trial_ids, base.is_target, base.scores * 2.0)
    s3 = TrialScores(base.trial_ids, base.is_target, np.array([0.0, 0.3, 0.6, 0.0, 0.3, 0.6]))
    fused = fuse_scores([base, s2, s3]).scores
    by_hand = [(0.9 + 1.8 + 0.0) / 3, (0.4 + 0.8 + 0.3) / 3, (0.3 + 0.6 + 0.6) / 3,
               (0.8 + 1.6 + 0.0) / 3, (0.2 + 0.4 + 0.3) / 3, (0.1 + 0.2 + 0.6) / 3]
    assert np.allclose(fused, by_hand, rtol=0, atol=1e-15)


def test_fusion_aligns_by_trial_id():
    a = TrialScores.from_trials([("x", "target", 1.0), ("y", "nontarget", 0.0)])
    b = TrialScores.from_trials([("y", "nontarget", 2.0), ("x", "target", 3.0)])
    assert fuse_scores([a, b]).scores.tolist() == [2.0, 1.0]


def test_fusion_errors():
    a = TrialScores.from_trials([("x", "target", 1.0), ("y", "nontarget", 0.0)])
    with pytest.raises(ValueError):
        fuse_scores([a, TrialScores.from_trials([("x", "target", 1.0), ("z", "nontarget", 0.0)])])
    with pytest.raises(ValueError):
        fuse_scores([a, TrialScores.from_trials([("x", "nontarget", 1.0), ("y", "nontarget", 0.0)])])
    with pytest.raises(ValueError):
        fuse_scores([])


def test_score_file_round_trip(tmp_path):
    t = six()
    path = tmp_path / "s.txt"
    write_scores(path, t)
    back = read_scores(path)
    assert back.trial_ids == t.trial_ids and np.array_equal(back.scores, t.scores)


@pytest.mark.parametrize(
    "text, line",
    [("a target 1\nb nontarget\n", 2), ("# c\na maybe 1\n", 2), ("a target x\n", 1), ("\n\na target nan\n", 3)],
)
def test_score_file_errors_name_the_line(text, line):
    with pytest.raises(ScoreFileError, match=f":{line}:"):
        parse_scores(text.splitlines(), "f")


def test_det_csv(tmp_path):
    path = tmp_path / "det.csv"
    write_det_csv(path, det_points(six()))
    lines = path.read_text().splitlines()
    assert lines[0] == "p_fa,p_miss,threshold" and len(lines) == 8
    assert lines[1] == "1.0,0.0,-inf"
