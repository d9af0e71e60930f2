"""Recompute every reduction chain and print each computed equation next to its target."""

from lieheat.catalog import compile_entry, data_path, read_file, verify_entry


def main():
    for name in ("reductions.cat", "variants.cat"):
        for raw in read_file(data_path(name)):
            if raw.get("kind") != "reduction":
                continue
            rep = verify_entry(compile_entry(raw))
            print(f"[{raw.id}] {'PASS' if rep.passed else 'DIFFERS'}  {raw.get('source')}")
            for c in rep.checks:
                if c.name.startswith(("target", "step")):
                    print(f"  {c.name}: {c.detail}")


if __name__ == "__main__":
    main()
