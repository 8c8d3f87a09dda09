from mecip._version import __version__

from mecip.data import CategoricalDataset, load_csv, write_csv
from mecip.graph import PartiallyDirectedGraph, cpdag_of, consistent_extension
from mecip.network import DiscreteBayesNet, SyntheticSpec, forward_sample, gen_random_net, read_bif, write_bif
from mecip.pipeline import LearnConfig, LearnResult, learn_config, learn_hc_tabu, learn_mecip, structural_metrics


__all__ = [
    '__version__',
    'CategoricalDataset',
    'DiscreteBayesNet',
    'LearnConfig',
    'LearnResult',
    'PartiallyDirectedGraph',
    'SyntheticSpec',
    'consistent_extension',
    'cpdag_of',
    'forward_sample',
    'gen_random_net',
    'learn_config',
    'learn_hc_tabu',
    'learn_mecip',
    'load_csv',
    'read_bif',
    'structural_metrics',
    'write_bif',
    'write_csv',
]
