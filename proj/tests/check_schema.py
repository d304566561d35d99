"""Run every sample config through the binary and validate the output against the schema."""
import json
import pathlib
import subprocess
import sys

import jsonschema

binary, schema_path, config_dir = sys.argv[1:4]
schema = json.loads(pathlib.Path(schema_path).read_text())
validator = jsonschema.Draft202012Validator(schema)
failed = 0
for cfg in sorted(pathlib.Path(config_dir).glob("*.json")):
    mode = json.loads(cfg.read_text())["mode"]
    out = subprocess.run([binary, mode, "--config", str(cfg)], capture_output=True, text=True)
    doc = json.loads(out.stdout)
    errors = list(validator.iter_errors(doc))
    if doc["exit_code"] != out.returncode:
        errors.append(f"exit code {out.returncode} != document {doc['exit_code']}")
    for e in errors:
        print(f"{cfg.name}: {getattr(e, 'message', e)}")
    failed += bool(errors)
    print(f"{cfg.name}: exit {out.returncode}, {'ok' if not errors else 'INVALID'}")
sys.exit(1 if failed else 0)
