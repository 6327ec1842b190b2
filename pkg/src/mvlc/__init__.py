"""Multi-valued logic circuit construction, simulation and transistor-count analysis."""
from .catalog import Catalog, PortSpec, PrimitiveSpec, builtin_catalog, mixed_radix_adder_spec
from .generators import (GeneratorConfig, gen_binary_rca, gen_quaternary_rca, gen_v1_adder,
                         gen_v1_multiplier, gen_v2_structural, gen_wallace_binary,
                         gen_wallace_quaternary, wrap_primitive)
from .levels import (CodeMap, DigitVector, LogicLevel, add_oracle, decompose_quaternary, gray_decode,
                     gray_encode, mul_digit_oracle, radix_convert, radix_unconvert, successor, threshold)
from .netlist import Netlist, NetlistBuilder, fanout_map, insert_buffers, topo_order, validate
from .report import compare, metrics, reference_tables
from .simulate import equiv_check, evaluate, verify_exhaustive, verify_sampled

__version__ = "0.1.0"
