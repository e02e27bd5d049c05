#!/usr/bin/env python3
"""Regenerates tests/fixtures. Output is deterministic for a given Python version."""
import os
import random
import sys

out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")


def write(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write(text)


def domain(name, classes, n, systems, rng, with_aux):
    d = os.path.join(out, name)
    ids = [f"{name[:3]}{i:03d}" for i in range(n)]
    truth = {i: rng.choice(classes) for i in ids}
    write(os.path.join(d, "truth.csv"), "instance_id,label\n" + "".join(f"{i},{truth[i]}\n" for i in ids))
    latent = {i: [rng.gauss(0, 1) for _ in range(3)] for i in ids}
    # Hard instances are missed by everyone, usually towards the same wrong class.
    difficulty = {i: rng.random() ** 2 for i in ids}
    confuser = {i: rng.choice([c for c in classes if c != truth[i]]) for i in ids}
    manifest = [f'domain = "{name}"', 'truth = "truth.csv"', ""]
    for sid, family, acc in systems:
        preds = {}
        for i in ids:
            if rng.random() >= (1 - acc) * 2 * difficulty[i] * 1.5:
                preds[i] = truth[i]
            elif rng.random() < 0.6:
                preds[i] = confuser[i]
            else:
                preds[i] = rng.choice([c for c in classes if c != truth[i]])
        write(os.path.join(d, f"{sid}.csv"), "instance_id,label\n" + "".join(f"{i},{preds[i]}\n" for i in ids))
        manifest += ["[[system]]", f'id = "{sid}"', f'family = "{family}"', f'predictions = "{sid}.csv"']
        if with_aux:
            rows = []
            for i in ids:
                w = [rng.random() * 0.3 for _ in classes]
                w[classes.index(preds[i])] += 1.0
                s = sum(w)
                p = [round(x / s, 6) for x in w]
                p[-1] = round(1.0 - sum(p[:-1]), 6)
                rows.append(i + "," + ",".join(f"{x:.6f}" for x in p))
            write(os.path.join(d, f"{sid}_conf.csv"), "instance_id," + ",".join(classes) + "\n" + "\n".join(rows) + "\n")
            dim = rng.randint(3, 6)
            mix = [[rng.gauss(0, 1) for _ in range(dim)] for _ in range(3)]
            rows = []
            for i in ids:
                v = [sum(latent[i][k] * mix[k][j] for k in range(3)) + rng.gauss(0, 0.5) for j in range(dim)]
                rows.append(i + "," + ",".join(f"{x:.6f}" for x in v))
            write(os.path.join(d, f"{sid}_repr.csv"),
                  "instance_id," + ",".join(f"f{j}" for j in range(dim)) + "\n" + "\n".join(rows) + "\n")
            manifest += [f'confidences = "{sid}_conf.csv"', f'representations = "{sid}_repr.csv"']
        manifest.append("")
    write(os.path.join(d, "manifest.toml"), "\n".join(manifest))


rng = random.Random(20240611)
domain("animals", ["bird", "cat", "dog", "fish", "horse"], 60,
       [("human1", "human", 0.8), ("human2", "human", 0.75), ("cnn1", "CNN", 0.7), ("cnn2", "CNN", 0.65),
        ("vit1", "ViT", 0.7)], rng, True)
domain("vehicles", ["bike", "bus", "car", "truck"], 50,
       [("human1", "human", 0.85), ("cnn1", "CNN", 0.6), ("cnn2", "CNN", 0.7), ("vit1", "ViT", 0.75)], rng, False)

# Full confusion matrices (diagonal included) for the matrix form of CLES.
write(os.path.join(out, "confusion", "cnn1.csv"),
      "truth,bird,cat,dog\nbird,12,3,1\ncat,2,15,4\ndog,0,5,9\n")
write(os.path.join(out, "confusion", "human1.csv"),
      "truth,bird,cat,dog\nbird,14,1,1\ncat,3,17,1\ndog,1,2,11\n")
write(os.path.join(out, "families.csv"), "system_id,family\nhuman1,human\nhuman2,human\ncnn1,CNN\ncnn2,CNN\nvit1,ViT\n")
