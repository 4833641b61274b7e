"""Runs the CLI and validates its JSON outputs against the shipped schemas."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def run(cli, *args):
    res = subprocess.run([cli, *args], capture_output=True, text=True)
    if res.returncode != 0:
        sys.exit(f"{' '.join(args)} exited {res.returncode}: {res.stderr}")
    return res.stdout


def check(schema_dir, name, path):
    schema = json.loads((schema_dir / f"{name}.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    doc = json.loads(pathlib.Path(path).read_text())
    jsonschema.validate(doc, schema, cls=jsonschema.Draft202012Validator)
    print(f"{name}: ok")


def main():
    cli, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
    with tempfile.TemporaryDirectory() as tmp:
        t = pathlib.Path(tmp)
        run(cli, "synth", "--out", str(t / "ds"), "--count", "12", "--seed", "3")
        manifest = str(t / "ds" / "manifest.csv")
        run(cli, "evaluate", "--manifest", manifest, "--estimator", "gw",
            "--estimator", "msvr:C=1,gamma=1,epsilon=0.05", "--repeats", "2",
            "--out", str(t / "eval"))
        check(schema_dir, "report", t / "eval" / "report.json")
        run(cli, "estimate", "--manifest", manifest, "--estimator", "sog",
            "--out", str(t / "est.json"))
        check(schema_dir, "estimates", t / "est.json")
        image = str(t / "ds" / "images" / "scene_00000.tiff")
        run(cli, "correct", "--image", image, "--estimator", "wp", "--out",
            str(t / "c.png"))
        check(schema_dir, "corrected", t / "c.png.json")


if __name__ == "__main__":
    main()
