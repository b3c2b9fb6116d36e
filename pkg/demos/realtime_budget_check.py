#!/usr/bin/env python3
"""Measure per-hop processing time against the 2.5 ms real-time budget.

Runs the full analysis-subtract-render path over ten seconds of dense
synthetic noise. The first engine exists only to absorb one-time JIT
compilation; the second is the one being measured.
"""

from vibroclean import Engine, EngineConfig, generate
from vibroclean.io_cli import bench_scenario

config = EngineConfig(mode="calibrate")

print("warming up compiled kernels...")
warm = Engine(config)
warm.run_stream(generate(bench_scenario(0.1)))

seconds = 10.0
print(f"timing {seconds:.0f} s of stream ({int(seconds * 400)} hops)...")
engine = Engine(config)
engine.run_stream(generate(bench_scenario(seconds)))

timing = engine.perf_report()
budget = config.hop_seconds
print(f"\n  hop budget: {budget * 1e3:.3f} ms")
print(f"  mean:       {timing['mean_s'] * 1e3:.3f} ms  ({budget / timing['mean_s']:.1f}x headroom)")
print(f"  p95:        {timing['p95_s'] * 1e3:.3f} ms")
print(f"  p99:        {timing['p99_s'] * 1e3:.3f} ms")
print(f"  max:        {timing['max_s'] * 1e3:.3f} ms")
print(f"  misses:     {timing['deadline_misses']} of {timing['frames']}")
