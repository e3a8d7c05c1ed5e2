"""End-to-end checks of the cramerlab executable: exit codes, artifacts, worker invariance."""

import json
import os
import subprocess
import sys
import tempfile


def run(binary, args, env=None):
    full_env = dict(os.environ)
    full_env.pop("CRAMERLAB_WORKERS", None)
    full_env.update(env or {})
    return subprocess.run([binary] + args, capture_output=True, text=True, env=full_env)


def write(path, obj):
    with open(path, "w") as f:
        f.write(obj if isinstance(obj, str) else json.dumps(obj))


def read(path):
    with open(path, "rb") as f:
        return f.read()


def main(binary):
    failures = []

    def expect(cond, what):
        if not cond:
            failures.append(what)

    with tempfile.TemporaryDirectory() as tmp:
        bad = os.path.join(tmp, "bad.json")
        out = os.path.join(tmp, "bad_out")
        write(bad, {"model": {"kind": "cube", "n": 2}, "extra": True})
        r = run(binary, ["transform", "--config", bad, "--out", out])
        expect(r.returncode == 2, "unknown key must exit 2")
        expect(not os.path.exists(out), "a rejected config must leave no artifacts")

        write(bad, "{")
        r = run(binary, ["simulate", "--config", bad, "--out", out])
        expect(r.returncode == 2 and not os.path.exists(out), "malformed JSON must exit 2 without artifacts")

        write(bad, {"model": {"kind": "cube", "n": 3}, "N": 2})
        r = run(binary, ["simulate", "--config", bad, "--out", out])
        expect(r.returncode == 2, "N <= n must be a config error")

        r = run(binary, ["verify", "--suite", "lemma43", "--out", os.path.join(tmp, "v")])
        expect(r.returncode == 0, "verify lemma43 must pass")
        doc = json.loads(read(os.path.join(tmp, "v", "verify.json")))
        expect(doc["suite"]["count"] == 98, "lemma43 lists 98 checks")
        meta = json.loads(read(os.path.join(tmp, "v", "verify.meta.json")))
        expect("wall_clock_seconds" in meta and meta["config_hash"] == doc["config_hash"], "meta sidecar")

        configs = {
            "transform": {"model": {"kind": "cube", "n": 3}, "points": {"count": 3}},
            "depth": {"model": {"kind": "ball", "n": 3}, "points": {"count": 3}},
            "simulate": {"model": {"kind": "gaussian", "n": 2}, "N": 20, "trials": 6, "test_points": 100},
            "beta": {"model": {"kind": "cube", "n": 4}, "isotropic_samples": 2000},
            "moments": {"model": {"kind": "ball_vol1", "n": 3}, "path": "monte_carlo", "samples": 3000},
            "threshold": {
                "model": {"kind": "cube", "n": 3},
                "rho_grid": [0.8, 1.4],
                "trials": 3,
                "test_points": 50,
                "moment_samples": 1000,
                "sublevel_samples": 1000,
                "isotropic_samples": 1000,
            },
        }
        for command, cfg in configs.items():
            path = os.path.join(tmp, command + ".json")
            write(path, cfg)
            dirs = []
            for workers, how in (("1", "flag"), ("4", "env")):
                d = os.path.join(tmp, f"{command}_{workers}")
                args = [command, "--config", path, "--out", d, "--seed", "7"]
                env = None
                if how == "flag":
                    args += ["--workers", workers]
                else:
                    env = {"CRAMERLAB_WORKERS": workers}
                r = run(binary, args, env)
                expect(r.returncode == 0, f"{command} exit code {r.returncode}: {r.stderr.strip()}")
                dirs.append(d)
            names = sorted(n for n in os.listdir(dirs[0]) if not n.endswith(".meta.json"))
            expect(names, f"{command} wrote no artifacts")
            for name in names:
                expect(read(os.path.join(dirs[0], name)) == read(os.path.join(dirs[1], name)),
                       f"{command}/{name} differs between 1 and 4 workers")
            meta = json.loads(read(os.path.join(dirs[1], command + ".meta.json")))
            expect(meta["workers"] == 4, f"{command}: CRAMERLAB_WORKERS fallback not applied")

    for f in failures:
        print("FAIL:", f)
    print(f"{len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
