"""Validate the problem fixtures against docs/schemas."""
import glob
import json
import os
import sys

import jsonschema
from referencing import Registry, Resource

schemas, problems = sys.argv[1], sys.argv[2]
reg = Registry()
for path in glob.glob(os.path.join(schemas, "*.json")):
    with open(path) as fh:
        reg = reg.with_resource(os.path.basename(path), Resource.from_contents(json.load(fh)))
with open(os.path.join(schemas, "problem.schema.json")) as fh:
    validator = jsonschema.Draft202012Validator(json.load(fh), registry=reg)

failed = 0
for path in sorted(glob.glob(os.path.join(problems, "*.json"))):
    with open(path) as fh:
        errors = [e.message for e in validator.iter_errors(json.load(fh))]
    if errors:
        failed += 1
        print(f"{os.path.basename(path)}: {errors}")

# a payload missing required keys must be rejected
bad = {"schema_version": "1", "task": "snake", "payload": {"family": {"variant": "power", "params": [0],
                                                                     "domain": {"kind": "real_line"}}}}
if validator.is_valid(bad):
    failed += 1
    print("incomplete snake payload accepted")
sys.exit(1 if failed else 0)
