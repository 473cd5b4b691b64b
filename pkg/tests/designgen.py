"""Random small design documents for property, fuzz and oracle tests."""
import random

import yaml

from cisenergy.design import load_design


def _stencil_out(n, k, s):
    return (n - k) // s + 1


def random_document(rng, max_side=64, max_stages=4, single_clock=False):
    """A design document (as a dict) that is valid by construction."""
    h, w = rng.randint(4, max_side), rng.randint(4, max_side)
    stages = [{"name": "input", "kind": "PixelInput", "input_size": [h, w, 1]}]
    mapping, links = {"input": "pixel_array"}, {}
    arrays = [{
        "name": "pixel_array",
        "num_input": [h, w, 1],
        "num_output": [1, w, 1],
        "input_domain": "Charge",
        "output_domain": "Voltage",
        "components": [{"kind": rng.choice(["APS4T", "APS3T"]), "count": rng.choice([h * w, w, rng.randint(1, h * w)])}],
    }]
    shapes = {"input": (h, w, 1)}
    prev, last_array = "input", "pixel_array"
    budget = rng.randint(1, max_stages - 1)

    # optional analog binning on the pixel array
    if budget > 1 and rng.random() < 0.5:
        k = rng.randint(1, 3)
        s = rng.randint(1, k)
        oh, ow = _stencil_out(h, k, s), _stencil_out(w, k, s)
        stages.append({"name": "bin", "kind": "Stencil", "input_size": [h, w, 1], "output_size": [oh, ow, 1],
                       "kernel": [k, k], "stride": [s, s], "ops_per_window": rng.randint(1, 9),
                       "predecessors": ["input"]})
        mapping["bin"] = "pixel_array"
        shapes["bin"] = (oh, ow, 1)
        prev = "bin"
        budget -= 1
    # optional analog compute array
    if budget > 1 and rng.random() < 0.3:
        ih, iw, _ = shapes[prev]
        k = rng.randint(1, min(2, ih, iw))
        oh, ow = _stencil_out(ih, k, 1), _stencil_out(iw, k, 1)
        stages.append({"name": "amac", "kind": "Stencil", "input_size": [ih, iw, 1], "output_size": [oh, ow, 1],
                       "kernel": [k, k], "stride": [1, 1], "ops_per_window": rng.randint(1, 4),
                       "predecessors": [prev]})
        mapping["amac"] = "mac_array"
        shapes["amac"] = (oh, ow, 1)
        arrays.append({"name": "mac_array", "source": ["pixel_array"], "num_input": [1, w, 1],
                       "num_output": [1, w, 1], "input_domain": "Voltage", "output_domain": "Voltage",
                       "components": [{"kind": "MAC", "count": rng.randint(1, 2 * w)}]})
        last_array = "mac_array"
        prev = "amac"
        budget -= 1
    adc_cols = rng.randint(1, w)
    arrays.append({"name": "adc_array", "source": [last_array], "num_input": [1, w, 1], "num_output": [1, adc_cols, 1],
                   "input_domain": "Voltage", "output_domain": "Digital",
                   "components": [{"kind": "ADC", "count": rng.randint(1, w)}]})
    if adc_cols != w:
        # column-parallel to narrower readout needs an analog buffer in between
        arrays.insert(-1, {"name": "sample_hold", "source": [last_array], "num_input": [1, w, 1],
                           "num_output": [1, adc_cols, 1], "input_domain": "Voltage", "output_domain": "Voltage",
                           "components": [{"kind": "SampleHold", "count": w}]})
        arrays[-1]["source"] = ["sample_hold"]
        arrays[-1]["num_input"] = [1, adc_cols, 1]

    memories, units = [], []
    clocks = ["100MHz"] if single_clock else ["50MHz", "100MHz", "200MHz"]
    producer_unit = {s["name"]: mapping[s["name"]] for s in stages}
    for i in range(budget):
        name = f"s{i}"
        ih, iw, ic = shapes[prev]
        choice = rng.random()
        same_shape = [p for p, sh in shapes.items() if sh == shapes[prev] and p != prev]
        if i == budget - 1 and choice < 0.2:
            c = rng.randint(1, 4)
            oh, ow = max(1, ih // 2), max(1, iw // 2)
            stage = {"name": name, "kind": "DNNLayerList", "input_size": [ih, iw, ic],
                     "layers": [{"output": [oh, ow, c], "macs_per_output": rng.randint(1, 27)}],
                     "predecessors": [prev]}
            out = (oh, ow, c)
        elif choice < 0.4:
            preds = [prev]
            if same_shape and rng.random() < 0.5:
                preds.append(rng.choice(same_shape))
            stage = {"name": name, "kind": "ElementwiseBinary", "input_size": [ih, iw, ic], "predecessors": preds}
            out = (ih, iw, ic)
        else:
            kh, kw = rng.randint(1, min(3, ih)), rng.randint(1, min(3, iw))
            sh, sw = rng.randint(1, 2), rng.randint(1, 2)
            out = (_stencil_out(ih, kh, sh), _stencil_out(iw, kw, sw), rng.choice([ic, 1, 2]))
            stage = {"name": name, "kind": "Stencil", "input_size": [ih, iw, ic], "output_size": list(out),
                     "kernel": [kh, kw], "stride": [sh, sw], "ops_per_window": rng.randint(0, 9),
                     "predecessors": [prev]}
        stages.append(stage)
        unit, mem = f"u{i}", f"m{i}"
        srcs = []
        for p in stage["predecessors"]:
            pu = producer_unit[p]
            pu = "adc_array" if pu in ("pixel_array", "mac_array") else pu
            if pu not in srcs:
                srcs.append(pu)
        kind = rng.choice(["LineBuffer", "FIFO", "DoubleBuffer"])
        m = {"name": mem, "kind": kind, "source": srcs, "ports": rng.randint(1, 3),
             "read_energy": f"{rng.uniform(0.1, 2):.3f}pJ", "write_energy": f"{rng.uniform(0.1, 2):.3f}pJ",
             "leakage_power": f"{rng.uniform(0, 50):.2f}uW"}
        if kind == "LineBuffer":
            m["rows"] = rng.randint(1, 4)
            m["row_width"] = iw
        else:
            m["capacity"] = f"{rng.choice([1, 64, 1024, 1 << 20])}B"
        if rng.random() < 0.3:
            m["active_fraction"] = round(rng.random(), 3)
        memories.append(m)
        units.append({
            "name": unit, "kind": "SystolicArray" if stage["kind"] == "DNNLayerList" else "PipelinedAccelerator",
            "source": [mem], "input_pixels_per_cycle": [1, rng.randint(1, 4), 1],
            "output_pixels_per_cycle": [1, rng.randint(1, 2), 1], "num_stages": rng.randint(1, 5),
            "clock": rng.choice(clocks), "energy_per_cycle": f"{rng.uniform(0.5, 10):.2f}pJ",
            "rows": rng.randint(1, 4), "cols": rng.randint(1, 4),
        })
        mapping[name] = unit
        producer_unit[name] = unit
        shapes[name] = out
        prev = name
    links[prev] = ["mipi"]
    if rng.random() < 0.3:
        links.setdefault("input", []).append("utsv")
    return {
        "globals": {"fps": "30Hz", "bit_depth": rng.choice([8, 10, 12])},
        "software": {"stages": stages},
        "hardware": {
            "layers": [{"name": "sensor", "process_node": "65nm", "area": "1mm^2"}],
            "analog_arrays": arrays,
            "digital_units": units,
            "memories": memories,
            "links": [{"name": "mipi", "kind": "MIPI", "energy_per_byte": "100pJ/B"},
                      {"name": "utsv", "kind": "uTSV", "energy_per_byte": "1pJ/B"}],
        },
        "mapping": {"stages": mapping, "links": links},
    }


def mutate(doc, rng):
    """Apply one random, possibly breaking, edit to a document."""
    hw = doc["hardware"]
    units = [a["name"] for a in hw["analog_arrays"]] + [u["name"] for u in hw["digital_units"]]
    pick = rng.randrange(6)
    if pick == 0:
        stage = rng.choice(list(doc["mapping"]["stages"]))
        doc["mapping"]["stages"][stage] = rng.choice(units + [m["name"] for m in hw["memories"]])
    elif pick == 1:
        a = rng.choice(hw["analog_arrays"])
        a["output_domain"] = rng.choice(["Charge", "Voltage", "Current", "Time", "Digital"])
    elif pick == 2 and hw["memories"]:
        m = rng.choice(hw["memories"])
        m["source"] = [rng.choice(units)]
    elif pick == 3:
        a = rng.choice(hw["analog_arrays"])
        a["num_output"] = [1, rng.randint(1, 8), 1]
    elif pick == 4 and hw["digital_units"]:
        u = rng.choice(hw["digital_units"])
        u["source"] = [rng.choice(units + [m["name"] for m in hw["memories"]])]
    else:
        stage = rng.choice(doc["software"]["stages"][1:] or doc["software"]["stages"])
        doc["mapping"]["stages"][stage["name"]] = rng.choice(units)
    return doc


def load(doc, name="random"):
    return load_design(yaml.safe_dump(doc, sort_keys=False), name=name)


def random_design(seed, **kw):
    return load(random_document(random.Random(seed), **kw), name=f"random_{seed}")
