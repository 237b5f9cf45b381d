from .wronskian import wronskian2
from .first_order import first_order_map, first_order_potential
from .second_order import (
    TransformMode,
    TransformResult,
    TransformationSpec,
    confluent_wc,
    reverse_transform,
    second_order_map,
    second_order_potential,
)
from .chain import ChainSplit, ChainStep, chain_split
