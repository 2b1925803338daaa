"""Misbehaving solver stand-in: ``fake_solver.py MODE MODEL.cbf SOLUTION.txt``."""

import sys
import time


def main(mode, model, out):
    names = [line.split()[4] for line in open(model, encoding="utf-8") if line.startswith("# var ")]
    if mode == "exit":
        print("license expired", file=sys.stderr)
        return 3
    if mode == "sleep":
        time.sleep(30)
        return 0
    if mode == "nofile":
        return 0
    values = {n: 0.0 for n in names}
    if mode == "fractional":
        for n in names:
            if n.startswith("x("):
                values[n] = 0.4
        values["t(0,0)"] = 1.0
    elif mode in ("single", "noobj", "wrong-objective"):
        values["t(0,0)"] = 1.0
        for n in names:
            if n.startswith("x(") and n.endswith(",0)"):
                values[n] = 1.0
    with open(out, "w", encoding="utf-8") as fh:
        if mode == "wrong-objective":
            fh.write("objective 1.0\n")
        elif mode == "single":
            fh.write("objective 61.25\n")
        for n, v in values.items():
            fh.write(f"{n} {v!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:]))
