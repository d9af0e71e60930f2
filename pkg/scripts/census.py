"""Census of primary entries per group dimension, broken down by abstract label."""

from collections import Counter

from lieheat.catalog import census, load_shipped, shipped_errata


def main():
    entries = [e for e in load_shipped() if e.census is not None and e.status == "primary"]
    for dim, count in census(entries).items():
        labels = Counter(e.label.name if e.label else "?" for e in entries if e.census == dim)
        parts = ", ".join(f"{k} {v}" for k, v in sorted(labels.items()))
        print(f"dim {dim}: {count:3d}  ({parts})")
    for k in shipped_errata().values():
        if k.census:
            print(f"{k.entry_id}: printed {k.census[1]} for dim {k.census[0]}; {k.note}")


if __name__ == "__main__":
    main()
