"""Compare compiled and pure-Python kernels: python benchmarks/bench_kernels.py [n]."""
import sys

from cuttree.bench import run_benchmark

n = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
res = run_benchmark(n=n, replicas=10)
print(f"n={res['n']} active backend: {res['active']}")
by = {}
for r in res["timings"]:
    by.setdefault(r["kernel"], {})[r["backend"]] = r["seconds"]
for kernel, t in by.items():
    line = "  ".join(f"{b}={s * 1e3:8.3f} ms" for b, s in t.items())
    if "cython" in t:
        line += f"  speedup={t['python'] / t['cython']:6.1f}x"
    print(f"{kernel:8s} {line}")
