import json
import os
import random
import subprocess
import threading
import time

import pytest

import visrl

GT = [
    {"bbox_2d": [10, 100, 200, 210], "point_2d": [30, 110]},
    {"bbox_2d": [225, 296, 406, 386], "point_2d": [302, 310]},
]
PERFECT = "<think>The car is left. The bus is right.</think><answer>" + json.dumps(GT) + "</answer>"


def test_api_version():
    assert visrl.api_version() == "1.0.0"
    assert visrl.__version__ == "1.0.0"


def test_score_rollout_examples():
    r = visrl.score_rollout(PERFECT, GT)
    assert r["total"] == 6.0
    assert r["accuracy"] == 3.0
    assert r["pairs"] == [(0, 0), (1, 1)]
    assert visrl.score_rollout("", GT)["total"] == 0.0
    bad_json = visrl.score_rollout("<think>hm</think><answer>box at 1,2</answer>", GT)
    assert bad_json["thinking"] == 1.0
    assert bad_json["answer_format"] == 0.0


def test_score_rollout_inputs():
    flat = [[10, 100, 200, 210, 30, 110], [225, 296, 406, 386, 302, 310]]
    assert visrl.score_rollout(PERFECT, flat) == visrl.score_rollout(PERFECT, GT)
    assert visrl.score_rollout(PERFECT.encode(), GT) == visrl.score_rollout(PERFECT, GT)
    with pytest.raises(visrl.InvalidEncodingError):
        visrl.score_rollout(b"<think>\xff</think><answer>[]</answer>", GT)
    with pytest.raises(ValueError):
        visrl.score_rollout(PERFECT, [[1, 2, 3]])
    with pytest.raises(ValueError):
        visrl.score_rollout(PERFECT, GT, iou_min=0.0)


def test_group_advantages():
    assert visrl.group_advantages([0, 2]) == [-1.0, 1.0]
    assert visrl.group_advantages([1, 1, 1]) == [0.0, 0.0, 0.0]
    a = visrl.group_advantages([1, 2, 3])
    assert a[0] == pytest.approx(-1.224744871391589, abs=1e-12)
    assert a[1] == 0.0
    assert a[2] == pytest.approx(1.224744871391589, abs=1e-12)
    with pytest.raises(ValueError):
        visrl.group_advantages([])
    with pytest.raises(ValueError):
        visrl.group_advantages([1.0, float("nan")])


def test_batch_score_shape_and_errors():
    out = visrl.batch_score([[PERFECT, ""], ["x", PERFECT]], [GT, GT])
    assert [len(g) for g in out] == [2, 2]
    assert out[0][0]["total"] == 6.0
    assert out[0][1]["total"] == 0.0
    assert visrl.batch_score([], []) == []
    mixed = visrl.batch_score([[PERFECT], [b"\xff"], [PERFECT]], [GT, GT, [[1]]])
    assert mixed[0][0]["total"] == 6.0
    assert "error" in mixed[1]
    assert "error" in mixed[2]
    with pytest.raises(ValueError):
        visrl.batch_score([[PERFECT]], [])


def test_repeated_calls_are_identical():
    groups = [[PERFECT, "<think>a</think><answer>[]</answer>"]] * 3
    assert visrl.batch_score(groups, [GT] * 3) == visrl.batch_score(groups, [GT] * 3)


def random_gt(rng, n):
    out = []
    for _ in range(n):
        x1, y1 = rng.randint(0, 800), rng.randint(0, 800)
        w, h = rng.randint(5, 190), rng.randint(5, 190)
        out.append({"bbox_2d": [x1, y1, x1 + w, y1 + h], "point_2d": [x1 + w // 2, y1 + h // 2]})
    return out


def random_rollout(rng, gt):
    kind = rng.random()
    if kind < 0.15:
        return "".join(rng.choice("<>/{}[]thinkanswer: ,.0123") for _ in range(rng.randint(0, 40)))
    preds = []
    for g in gt:
        if rng.random() < 0.2:
            continue
        s = rng.choice([0.0, 2.0, 8.0, 25.0])
        b = [round(v + rng.gauss(0, s), 2) for v in g["bbox_2d"]]
        p = [round(v + rng.gauss(0, s), 2) for v in g["point_2d"]]
        preds.append({"bbox_2d": b, "point_2d": p})
    rng.shuffle(preds)
    think = "I look at the image. " * rng.randint(1, 2)
    body = json.dumps(preds) if kind > 0.25 else "not json"
    return f"<think>{think}</think><answer>{body}</answer>"


@pytest.mark.skipif("VISRL_CLI" not in os.environ, reason="needs the visrl CLI binary")
def test_parity_with_cli(tmp_path):
    rng = random.Random(5)
    samples, groups, gts = [], [], []
    for i in range(25):
        gt = random_gt(rng, rng.randint(1, 6))
        sid = f"s{i:03d}"
        samples.append({"sample_id": sid, "image_width": 1000, "image_height": 1000,
                        "query": "objects", "task_type": "detection", "gt": gt})
        groups.append({"sample_id": sid, "group": [random_rollout(rng, gt) for _ in range(4)]})
        gts.append(gt)
    (tmp_path / "samples.jsonl").write_text("".join(json.dumps(s) + "\n" for s in samples))
    (tmp_path / "rollouts.jsonl").write_text("".join(json.dumps(g) + "\n" for g in groups))
    proc = subprocess.run(
        [os.environ["VISRL_CLI"], "score", "--samples", str(tmp_path / "samples.jsonl"),
         "--rollouts", str(tmp_path / "rollouts.jsonl")],
        capture_output=True, text=True, check=True)
    cli = [json.loads(line) for line in proc.stdout.splitlines()]
    assert len(cli) == 100

    # The CLI writes 6 significant digits; compare after the same rounding.
    def wire(x):
        return float(f"{x:.6g}")

    binding = visrl.batch_score([g["group"] for g in groups], gts)
    flat = [(groups[i]["sample_id"], j, r) for i, g in enumerate(binding) for j, r in enumerate(g)]
    assert len(flat) == 100
    for rec, (sid, j, r) in zip(cli, flat):
        assert rec["sample_id"] == sid
        assert rec["rollout_index"] == j
        for key in ("thinking", "answer_format", "non_repeat"):
            assert rec[key] == r[key]
        assert abs(rec["accuracy"] - wire(r["accuracy"])) <= 1e-12
        assert abs(rec["total"] - wire(r["total"])) <= 1e-12

    for i, g in enumerate(binding):
        adv = visrl.group_advantages([r["total"] for r in g])
        for j, a in enumerate(adv):
            assert abs(cli[4 * i + j]["advantage"] - wire(a)) <= 1e-12


def test_batch_score_throughput():
    rng = random.Random(9)
    gts, groups = [], []
    for _ in range(125):
        gt = random_gt(rng, 30)
        gts.append(gt)
        groups.append([random_rollout(rng, gt) for _ in range(8)])
    t0 = time.perf_counter()
    out = visrl.batch_score(groups, gts)
    elapsed = time.perf_counter() - t0
    assert sum(len(g) for g in out) == 1000
    assert elapsed < 1.0, f"batch_score took {elapsed:.3f} s"


def test_batch_score_releases_the_gil():
    rng = random.Random(11)
    gt = random_gt(rng, 30)
    groups = [[random_rollout(rng, gt) for _ in range(8)] for _ in range(400)]
    gts = [gt] * len(groups)
    ticks = []
    done = threading.Event()

    def ticker():
        while not done.is_set():
            ticks.append(time.perf_counter())
            time.sleep(0.001)

    t = threading.Thread(target=ticker)
    t.start()
    time.sleep(0.01)
    t0 = time.perf_counter()
    visrl.batch_score(groups, gts)
    t1 = time.perf_counter()
    done.set()
    t.join()
    during = [x for x in ticks if t0 < x < t1]
    # Conversion and result building hold the GIL; the scoring phase must not.
    assert len(during) >= 3, f"{len(during)} ticks during a {t1 - t0:.3f} s call"
