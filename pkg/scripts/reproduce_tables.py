"""Regenerate the three reference tables and report deviations.

    python scripts/reproduce_tables.py [--iters N] [--table3-iters N]
"""

import argparse

from aimsolve.cli import resolve_config, table1_rows, table2_rows, table3_rows


def show(title, rows):
    print(f"\n{title}")
    print(f"{'params':<44}{'lvl':>4}{'E_aim':>16}{'E_oracle':>16}{'ref_E':>14}{'|aim-ref|':>11}")
    for r in rows:
        params = " ".join(f"{k}={v:g}" for k, v in r.params.items() if isinstance(v, (int, float)))
        ref = r.extra["ref_E"]
        gap = abs(r.E_aim - ref) if r.E_aim is not None else float("nan")
        print(f"{params:<44}{r.level:>4}{r.E_aim:>16.9f}{r.E_oracle:>16.9f}{ref:>14.8f}{gap:>11.2e}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--iters", type=int, default=12)
    ap.add_argument("--table3-iters", type=int, default=40)
    args = ap.parse_args()

    cfg = resolve_config(["table1", "--iters", str(args.iters)])
    rows, A = table1_rows(cfg)
    show(f"Table 1 (A calibrated to {A:.7f}, {args.iters} iterations)", rows)

    cfg = resolve_config(["table2", "--iters", str(args.iters)])
    show(f"Table 2 ({args.iters} iterations)", table2_rows(cfg))

    cfg = resolve_config(["table3", "--iters", str(args.table3_iters)])
    show(f"Table 3 ({args.table3_iters} iterations)", table3_rows(cfg))


if __name__ == "__main__":
    main()
