"""Smoke test for the uavsim_py extension.

Uses an installed uavsim_py if there is one, otherwise the library built by
`cargo build --release -p uavsim-py`.
"""

import importlib.machinery
import importlib.util
import json
import math
import pathlib
import sys
import tempfile


def load():
    try:
        import uavsim_py

        return uavsim_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libuavsim_py.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("uavsim_py", str(lib))
            spec = importlib.util.spec_from_file_location("uavsim_py", lib, loader=loader)
            mod = importlib.util.module_from_spec(spec)
            loader.exec_module(mod)
            return mod
    sys.exit("uavsim_py not found; run `cargo build --release -p uavsim-py` first")


def main():
    u = load()

    cfg = u.Config("greedy", 20.0)
    assert "mac.retry_limit" in u.Config.keys()
    assert cfg.get("mac.aloha_max_backoff") == "0.03"
    cfg.set("seed", "7")
    assert abs(cfg.max_range() - 249.1) < 0.1
    again = u.Config.parse(cfg.echo())
    assert again.echo() == cfg.echo()
    try:
        u.Config.parse("routing = greedy\nduration = 1\nvelcoity = 3\n")
    except ValueError as e:
        assert "velcoity" in str(e)
    else:
        raise AssertionError("unknown key accepted")

    a = u.run(cfg, trace=True)
    b = u.run(cfg, trace=True)
    assert a.report() == b.report()
    assert a.trace() == b.trace()
    m = a.metrics
    assert 0.0 <= m["pdr"] <= 1.0
    assert a.delivered == len(a.deliveries())
    assert sum(a.drops.values()) + a.delivered == a.generated
    first = json.loads(a.trace().splitlines()[0])
    assert list(first) == ["t_ns", "kind", "uav", "pkt", "x", "y", "z", "detail"]
    with tempfile.TemporaryDirectory() as d:
        a.write(d)
        assert (pathlib.Path(d) / "report.txt").read_text() == a.report()

    cells = u.sweep(u.Config("opar", 5.0), "velocity", ["5", "20"], reps=2)
    assert [c["value"] for c in cells] == ["5", "20"]
    assert cells[0]["seeds"] == [u.derive_seed(0, 0, 0), u.derive_seed(0, 0, 1)]

    assert u.airtime_ns(8 * 1082, 2e6) == 4_328_000
    assert math.isclose(u.comm_energy(0.1, 4328e-6), 4.328e-4, rel_tol=1e-12)
    assert u.propulsion_power(cfg, 0.0) == 79.86 + 88.63
    p = u.received_power(cfg, 0.1, (0, 0, 0), (100, 0, 0))
    wavelength = 299_792_458.0 / 2.4e9
    assert math.isclose(p, 0.1 * (wavelength / (4 * math.pi * 100)) ** 2, rel_tol=1e-12)

    print(f"ok: pdr={m['pdr']:.3f} delay={m['e2e_delay']:.4f}s generated={a.generated}")


if __name__ == "__main__":
    main()
