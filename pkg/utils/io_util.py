import csv
import json
import sys
from contextlib import contextmanager
from decimal import Decimal
from fractions import Fraction


def to_jsonable(value):
    if isinstance(value, Fraction):
        return {"num": value.numerator, "den": value.denominator}
    if isinstance(value, Decimal):
        return str(value)
    if hasattr(value, "item"):  # numpy scalars
        return value.item()
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    return value


def _cell(value):
    if isinstance(value, (list, tuple)):
        return " ".join(_cell(v) for v in value)
    if hasattr(value, "item"):
        value = value.item()
    return str(value)


@contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as f:
            yield f


def write_table(rows, columns, path, fmt="csv", header=None):
    """
    Write `rows` (dicts keyed by `columns`) as CSV or as one JSON document.

    CSV files start with `# key: value` comment lines built from `header`.
    """
    header = header or {}
    with _open_out(path) as f:
        if fmt == "json":
            doc = {"header": header, "columns": list(columns),
                   "rows": [{c: to_jsonable(r.get(c)) for c in columns} for r in rows]}
            json.dump(doc, f, sort_keys=True, indent=1)
            f.write("\n")
        elif fmt == "csv":
            for key in sorted(header):
                f.write(f"# {key}: {header[key]}\n")
            writer = csv.writer(f, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
            writer.writerow(columns)
            for r in rows:
                writer.writerow([_cell(r.get(c, "")) for c in columns])
        else:
            raise NotImplementedError(f"Unknown output format {fmt}")


def write_document(doc, path, header=None):
    with _open_out(path) as f:
        json.dump({"header": header or {}, **to_jsonable(doc)}, f, sort_keys=True, indent=1)
        f.write("\n")
