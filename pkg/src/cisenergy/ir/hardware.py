"""Hardware description: analog functional arrays, digital units, memories, links."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class HardwareError(ValueError):
    pass


class SignalDomain(str, Enum):
    CHARGE = "Charge"
    VOLTAGE = "Voltage"
    CURRENT = "Current"
    TIME = "Time"
    DIGITAL = "Digital"


def parse_domain(text):
    """A domain or a declared pair such as "Time&Current"; returns a frozenset of members."""
    if isinstance(text, SignalDomain):
        return frozenset([text])
    if isinstance(text, frozenset):
        return text
    parts = [p.strip() for p in str(text).split("&")]
    try:
        return frozenset(SignalDomain(p) for p in parts)
    except ValueError as e:
        raise HardwareError(f"unknown signal domain {text!r}") from e


def domain_label(dom):
    return "&".join(sorted(d.value for d in dom))


class CellClass(str, Enum):
    DYNAMIC = "Dynamic"
    STATIC_DIRECT = "StaticBiasedDirect"
    STATIC_GMID = "StaticBiasedGmId"
    NONLINEAR = "NonLinear"


GM_ID_RANGE = (10.0, 20.0)
HEADROOM_PER_TRANSISTOR = 0.3  # volts


def default_swing(supply, transistors=1):
    """Voltage swing left after one headroom drop per stacked transistor."""
    swing = supply - HEADROOM_PER_TRANSISTOR * transistors
    if swing <= 0:
        raise HardwareError(f"supply {supply} V leaves no swing across {transistors} transistors")
    return swing


@dataclass(frozen=True)
class CapNode:
    """One capacitance node of a dynamic cell. Exactly one of capacitance/resolution_bits is set."""
    voltage_swing: float
    capacitance: Optional[float] = None
    resolution_bits: Optional[int] = None
    noise_sigma: Optional[float] = None  # overrides the half-LSB noise budget

    def __post_init__(self):
        if self.voltage_swing <= 0:
            raise HardwareError("voltage swing must be > 0")
        if (self.capacitance is None) == (self.resolution_bits is None):
            raise HardwareError("a capacitance node needs either a capacitance or a resolution")
        if self.capacitance is not None and self.capacitance <= 0:
            raise HardwareError("capacitance must be > 0")
        if self.resolution_bits is not None and self.resolution_bits < 1:
            raise HardwareError("resolution must be >= 1 bit")
        if self.noise_sigma is not None and self.noise_sigma <= 0:
            raise HardwareError("noise sigma must be > 0")


@dataclass(frozen=True)
class ACellSpec:
    name: str
    cell_class: CellClass
    nodes: tuple = ()
    load_capacitance: Optional[float] = None
    voltage_swing: Optional[float] = None
    supply: Optional[float] = None
    gain: float = 1.0
    gm_over_id: Optional[float] = None
    fom_table: tuple = ()
    spatial_count: int = 1
    temporal_count: int = 1
    delay: Optional[float] = None  # user-pinned cell delay, seconds
    allow_gm_id_out_of_range: bool = False

    def __post_init__(self):
        object.__setattr__(self, "cell_class", CellClass(self.cell_class))
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "fom_table", tuple(sorted(tuple(p) for p in self.fom_table)))
        if self.spatial_count < 1 or self.temporal_count < 1:
            raise HardwareError(f"cell {self.name}: spatial/temporal counts must be >= 1")
        if self.delay is not None and self.delay <= 0:
            raise HardwareError(f"cell {self.name}: pinned delay must be > 0")
        cls = self.cell_class
        if cls is CellClass.DYNAMIC:
            if not self.nodes:
                raise HardwareError(f"cell {self.name}: dynamic cells need capacitance nodes")
        elif cls is CellClass.STATIC_DIRECT:
            self._need("load_capacitance", "voltage_swing", "supply")
        elif cls is CellClass.STATIC_GMID:
            self._need("load_capacitance", "gm_over_id", "supply")
            if self.gain <= 0:
                raise HardwareError(f"cell {self.name}: gain must be > 0")
            lo, hi = GM_ID_RANGE
            if not (lo <= self.gm_over_id <= hi) and not self.allow_gm_id_out_of_range:
                raise HardwareError(
                    f"cell {self.name}: gm/Id {self.gm_over_id} outside [{lo:g}, {hi:g}]; "
                    "set allow_gm_id_out_of_range to override"
                )
        elif cls is CellClass.NONLINEAR:
            if not self.fom_table:
                raise HardwareError(f"cell {self.name}: non-linear cells need a FoM table")
            if any(r <= 0 or e <= 0 for r, e in self.fom_table):
                raise HardwareError(f"cell {self.name}: FoM entries must be positive")

    def _need(self, *names):
        for n in names:
            v = getattr(self, n)
            if v is None or v <= 0:
                raise HardwareError(f"cell {self.name}: {n} must be given and > 0")

    @property
    def access_count(self):
        return self.spatial_count * self.temporal_count


class ComponentKind(str, Enum):
    APS3T = "APS3T"
    APS4T = "APS4T"
    DPS = "DPS"
    PWM = "PWM"
    ADC = "ADC"
    MAC = "MAC"
    MAX = "Max"
    SCALING = "Scaling"
    ADD = "Add"
    LOG = "Log"
    ABS = "Abs"
    COMPARATOR = "Comparator"
    PASSIVE_MEMORY = "PassiveMemory"
    ACTIVE_MEMORY = "ActiveMemory"
    SAMPLE_HOLD = "SampleHold"


PIXEL_KINDS = frozenset({ComponentKind.APS3T, ComponentKind.APS4T, ComponentKind.DPS, ComponentKind.PWM})
MEMORY_KINDS = frozenset({ComponentKind.PASSIVE_MEMORY, ComponentKind.ACTIVE_MEMORY, ComponentKind.SAMPLE_HOLD})
CONVERTER_KINDS = frozenset({ComponentKind.ADC, ComponentKind.COMPARATOR, ComponentKind.DPS})


@dataclass(frozen=True)
class AComponentSpec:
    name: str
    kind: ComponentKind
    cells: tuple
    input_domain: frozenset
    output_domain: frozenset

    def __post_init__(self):
        object.__setattr__(self, "kind", ComponentKind(self.kind))
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "input_domain", parse_domain(self.input_domain))
        object.__setattr__(self, "output_domain", parse_domain(self.output_domain))
        if not self.cells:
            raise HardwareError(f"component {self.name}: needs at least one cell")


@dataclass(frozen=True)
class AnalogArraySpec:
    name: str
    components: tuple  # of (AComponentSpec, num_component)
    num_input: tuple
    num_output: tuple
    input_domain: frozenset
    output_domain: frozenset
    source: tuple = ()
    layer: Optional[str] = None
    category: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "components", tuple((c, int(n)) for c, n in self.components))
        object.__setattr__(self, "input_domain", parse_domain(self.input_domain))
        object.__setattr__(self, "output_domain", parse_domain(self.output_domain))
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "num_input", tuple(self.num_input))
        object.__setattr__(self, "num_output", tuple(self.num_output))
        if not self.components:
            raise HardwareError(f"analog array {self.name}: needs at least one component")
        for comp, n in self.components:
            if n < 1:
                raise HardwareError(f"analog array {self.name}: num_component for {comp.name} must be >= 1")
        for dims in (self.num_input, self.num_output):
            if len(dims) != 3 or any(d < 1 for d in dims):
                raise HardwareError(f"analog array {self.name}: signal dimensions must be 3 integers >= 1")

    @property
    def kinds(self):
        return {c.kind for c, _ in self.components}

    @property
    def is_pixel_array(self):
        return bool(self.kinds & PIXEL_KINDS)

    @property
    def is_analog_memory(self):
        return self.kinds <= MEMORY_KINDS

    @property
    def has_converter(self):
        return bool(self.kinds & CONVERTER_KINDS)

    @property
    def default_category(self):
        if self.category:
            return self.category
        if self.is_pixel_array or self.has_converter:
            return "SEN"
        if self.is_analog_memory:
            return "MEM"
        return "COMP"

    @property
    def output_rate(self):
        h, w, c = self.num_output
        return h * w * c


class DigitalKind(str, Enum):
    PIPELINED = "PipelinedAccelerator"
    SYSTOLIC = "SystolicArray"


@dataclass(frozen=True)
class DigitalUnitSpec:
    name: str
    kind: DigitalKind
    input_pixels_per_cycle: tuple
    output_pixels_per_cycle: tuple
    num_stages: int
    energy_per_cycle: float
    clock: float
    rows: int = 1
    cols: int = 1
    source: tuple = ()
    layer: Optional[str] = None
    category: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", DigitalKind(self.kind))
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "input_pixels_per_cycle", tuple(self.input_pixels_per_cycle))
        object.__setattr__(self, "output_pixels_per_cycle", tuple(self.output_pixels_per_cycle))
        for dims in (self.input_pixels_per_cycle, self.output_pixels_per_cycle):
            if len(dims) != 3 or any(d < 1 for d in dims):
                raise HardwareError(f"digital unit {self.name}: pixels per cycle must be 3 integers >= 1")
        if self.num_stages < 1 or self.rows < 1 or self.cols < 1:
            raise HardwareError(f"digital unit {self.name}: stage/row/col counts must be >= 1")
        if self.energy_per_cycle < 0:
            raise HardwareError(f"digital unit {self.name}: energy per cycle must be >= 0")
        if self.clock <= 0 or int(self.clock) != self.clock:
            raise HardwareError(f"digital unit {self.name}: clock must be a positive whole number of Hz")

    @property
    def in_rate(self):
        h, w, c = self.input_pixels_per_cycle
        return h * w * c

    @property
    def out_rate(self):
        h, w, c = self.output_pixels_per_cycle
        return h * w * c

    @property
    def macs_per_cycle(self):
        if self.kind is DigitalKind.SYSTOLIC:
            return self.rows * self.cols
        return self.out_rate


class MemoryKind(str, Enum):
    FIFO = "FIFO"
    LINE_BUFFER = "LineBuffer"
    DOUBLE_BUFFER = "DoubleBuffer"


@dataclass(frozen=True)
class MemorySpec:
    name: str
    kind: MemoryKind
    read_energy: float
    write_energy: float
    leakage_power: float
    capacity: Optional[float] = None  # bytes
    rows: Optional[int] = None
    row_width: Optional[int] = None
    ports: int = 1
    active_fraction: Optional[float] = None
    source: tuple = ()
    layer: Optional[str] = None
    category: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", MemoryKind(self.kind))
        object.__setattr__(self, "source", tuple(self.source))
        if self.kind is MemoryKind.LINE_BUFFER:
            if not self.rows or not self.row_width or self.rows < 1 or self.row_width < 1:
                raise HardwareError(f"memory {self.name}: line buffers need rows and row_width >= 1")
        elif self.capacity is None or self.capacity <= 0:
            raise HardwareError(f"memory {self.name}: capacity must be > 0")
        if self.ports < 1:
            raise HardwareError(f"memory {self.name}: ports must be >= 1")
        if self.active_fraction is not None and not (0.0 <= self.active_fraction <= 1.0):
            raise HardwareError(f"memory {self.name}: active fraction must lie in [0, 1]")
        if min(self.read_energy, self.write_energy, self.leakage_power) < 0:
            raise HardwareError(f"memory {self.name}: energies must be >= 0")

    def capacity_elements(self, channels, bit_depth):
        """Capacity in stored elements for a stream of the given channel count and bit depth."""
        if self.kind is MemoryKind.LINE_BUFFER:
            return self.rows * self.row_width * channels
        return int(self.capacity * 8 // bit_depth)


class LinkKind(str, Enum):
    MIPI = "MIPI"
    UTSV = "uTSV"


@dataclass(frozen=True)
class LinkSpec:
    name: str
    kind: LinkKind
    energy_per_byte: float
    layer: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", LinkKind(self.kind))
        if self.energy_per_byte <= 0:
            raise HardwareError(f"link {self.name}: energy per byte must be > 0")


@dataclass(frozen=True)
class LayerSpec:
    name: str
    process_node: Optional[float] = None  # metres
    area: Optional[float] = None  # square metres


@dataclass(frozen=True)
class Hardware:
    analog_arrays: tuple = ()
    digital_units: tuple = ()
    memories: tuple = ()
    links: tuple = ()
    layers: tuple = ()
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for group in (self.analog_arrays, self.digital_units, self.memories, self.links):
            for u in group:
                if u.name in index:
                    raise HardwareError(f"duplicate hardware unit name {u.name!r}")
                index[u.name] = u
        layer_names = {l.name for l in self.layers}
        for u in self.units:
            for s in u.source:
                if s not in index or isinstance(index[s], LinkSpec):
                    raise HardwareError(f"unit {u.name!r} lists unknown source {s!r}")
            if u.layer is not None and u.layer not in layer_names:
                raise HardwareError(f"unit {u.name!r} is placed on undeclared layer {u.layer!r}")
        object.__setattr__(self, "_index", index)

    @property
    def units(self):
        """Every unit that can appear in the data-flow topology (links excluded)."""
        return self.analog_arrays + self.digital_units + self.memories

    def __getitem__(self, name):
        return self._index[name]

    def __contains__(self, name):
        return name in self._index

    def get(self, name):
        return self._index.get(name)

    def layer(self, name):
        for l in self.layers:
            if l.name == name:
                return l
        return None

    def is_analog(self, name):
        return isinstance(self._index.get(name), AnalogArraySpec)

    def is_digital(self, name):
        return isinstance(self._index.get(name), DigitalUnitSpec)

    def is_memory(self, name):
        return isinstance(self._index.get(name), MemorySpec)
