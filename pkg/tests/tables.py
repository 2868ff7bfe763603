"""Read digit tables: the stored worked examples and rendered output."""

from pathlib import Path

DATA = Path(__file__).parent / "data"


def load_expected(name):
    """{(kind, item): digits} from a fixture file; W and K rows use item '-'."""
    rows = {}
    for line in (DATA / name).read_text().splitlines():
        kind, item, *digits = line.split()
        rows[(kind, item)] = [int(d) for d in digits]
    return rows


def parse_rendered(text):
    rows = {}
    for line in text.splitlines()[1:]:
        parts = line.split()
        if parts[0] in ("W", "K"):
            rows[(parts[0], "-")] = [int(d) for d in parts[1:]]
        else:
            rows[(parts[0], parts[1])] = [int(d) for d in parts[2:]]
    return rows


def differences(expected, rendered):
    """List of (row, column index, expected digit, rendered digit); missing rows count too."""
    out = []
    for key in sorted(set(expected) | set(rendered)):
        a, b = expected.get(key), rendered.get(key)
        if a is None or b is None or len(a) != len(b):
            out.append((key, None, a, b))
            continue
        out += [(key, i, x, y) for i, (x, y) in enumerate(zip(a, b)) if x != y]
    return out
