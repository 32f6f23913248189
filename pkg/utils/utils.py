import datetime
import io
import json
import os
import platform
import random
import sys
import tempfile

import numpy as np


def set_seed(seed):
    import torch
    torch.manual_seed(seed)
    np.random.seed(seed)
    random.seed(seed)


def derive_seed(seed, *keys):
    """Independent 32-bit seed for a sub-stream identified by keys"""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


def atomic_write(path, text):
    """Write text to a temp file in the target directory, then rename over path"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.tmp-', suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, 'w', newline='\n') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def to_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(path, obj):
    atomic_write(path, to_json(obj))


def csv_text(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_cell(x) for x in row) + "\n")
    return buf.getvalue()


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def matrix_csv(array):
    buf = io.StringIO()
    np.savetxt(buf, np.asarray(array), fmt='%.17g', delimiter=',')
    return buf.getvalue()


def library_versions():
    import scipy
    import sklearn
    import torch
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "torch": torch.__version__,
        "scikit-learn": sklearn.__version__,
    }


def append_run_record(out_dir, subcommand, opts):
    """Append the full configuration, seed and library versions to runs.jsonl"""
    config = {k: v for k, v in sorted(vars(opts).items()) if not callable(v)}
    record = {
        "subcommand": subcommand,
        "seed": getattr(opts, 'seed', None),
        "config": config,
        "versions": library_versions(),
        "argv": sys.argv[1:],
        "time": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, 'runs.jsonl'), 'a') as f:
        f.write(json.dumps(record, sort_keys=True, default=str) + "\n")
