from .multigraph import Multigraph, DatasetManifest, load_dataset, save_dataset, MANIFEST_SCHEMA
from .synthetic import SyntheticSpec, generate_synthetic
from .utils import split_masks, carve_validation
