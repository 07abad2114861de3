"""Validate a JSON document against one of the schemas in this directory."""
import json
import sys

import jsonschema

if len(sys.argv) != 3:
    sys.exit("usage: validate.py <schema.json> <document.json>")
with open(sys.argv[1]) as f:
    schema = json.load(f)
with open(sys.argv[2]) as f:
    doc = json.load(f)
jsonschema.Draft202012Validator.check_schema(schema)
jsonschema.validate(doc, schema, cls=jsonschema.Draft202012Validator)
print("valid:", sys.argv[2])
