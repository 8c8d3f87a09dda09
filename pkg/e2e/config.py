import os

# Directory with the reference BIF files (asia.bif, sachs.bif, child.bif, ...).
NETWORKS_DIR = os.environ.get('MECIP_NETWORKS_DIR')

try:
    from . import local_config
    NETWORKS_DIR = local_config.NETWORKS_DIR
except ImportError:
    pass
