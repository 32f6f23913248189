import argparse
import os

import methods
from graph.sparse import DEFAULT_MAX_NNZ

SUBCOMMANDS = ('extract', 'train', 'params', 'synth', 'eval')


def _list_of(cast):
    def parse(text):
        try:
            return [cast(x) for x in text.split(',') if x.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}")
    parse.__name__ = f"{cast.__name__}_list"
    return parse


float_list = _list_of(float)
int_list = _list_of(int)
str_list = _list_of(str)


def modify_command_options(opts, parser=None):
    def fail(msg):
        if parser is not None:
            parser.error(msg)
        raise ValueError(msg)

    if opts.subcommand == 'train':
        smgcn = opts.method == 'smgcn'
        if not smgcn:
            for flag, value in (('--threshold', opts.threshold), ('--keep-ties', opts.keep_ties or None),
                                ('--dedupe', opts.dedupe or None)):
                if value is not None:
                    fail(f"{flag} is only meaningful for --method smgcn")
        if opts.k < 1:
            fail(f"--k must be at least 1, got {opts.k}")
        if opts.epochs < 1:
            fail(f"--epochs must be positive, got {opts.epochs}")
        if not opts.lr or not opts.weight_decay:
            fail("--lr and --weight-decay grids must be non-empty")

    if opts.subcommand in ('extract', 'train') and opts.threshold is None:
        opts.threshold = 2
    if getattr(opts, 'threshold', None) is not None and opts.threshold < 2:
        fail(f"--threshold must be at least 2, got {opts.threshold}")

    if opts.subcommand == 'params':
        unknown = [m for m in opts.methods if m not in methods.get_method_list()]
        if unknown:
            fail(f"unknown methods {unknown}, choose from {methods.get_method_list()}")
        if opts.k_max < 1 or min(opts.m) < 2:
            fail("--k-max must be at least 1 and every --m at least 2")

    if opts.subcommand == 'eval' and opts.manifest is None and opts.labels is None:
        fail("eval needs --manifest or --labels")

    opts.normalize = not getattr(opts, 'raw_operators', False)
    return opts


def _add_common(parser, subcommand):
    parser.add_argument("--seed", type=int, default=44,
                        help="random seed driving every random choice (default: 44)")
    parser.add_argument("--out", type=str, default=os.path.join('out', subcommand),
                        help=f"output directory (default: out/{subcommand})")
    parser.add_argument("--data-root", type=str, default=os.environ.get('SMGCN_DATA_ROOT', 'data'),
                        help="directory relative manifest paths are resolved against (env: SMGCN_DATA_ROOT)")
    parser.add_argument("--threads", type=int, default=1,
                        help="torch intra-op threads (default: 1)")
    parser.add_argument("--debug", action='store_true', default=False,
                        help="verbose option")
    parser.add_argument("--logdir", type=str, default='./logs',
                        help="tensorboard directory (default: ./logs)")
    parser.add_argument("--visualize", action='store_true', default=False,
                        help="log scalars and tables to tensorboard (default: No)")
    parser.add_argument("--progress", action='store_true', default=False,
                        help="show progress bars on the diagnostic stream")


def _add_synthetic(parser):
    group = parser.add_argument_group("synthetic dataset (used when --manifest is absent)")
    group.add_argument("--n", type=int, default=300, help="number of nodes (default: 300)")
    group.add_argument("--m", type=int, default=3, help="number of views (default: 3)")
    group.add_argument("--classes", type=int, default=3, help="planted communities (default: 3)")
    group.add_argument("--p-in", type=float, default=0.1, help="within-class edge probability (default: 0.1)")
    group.add_argument("--p-out", type=float, default=0.01, help="cross-class edge probability (default: 0.01)")
    group.add_argument("--noise", type=float_list, default=[0.0],
                       help="edge-flip probability, one value or one per view (default: 0)")
    group.add_argument("--feat-dim", type=int, default=16, help="feature dimension (default: 16)")
    group.add_argument("--snr", type=float, default=1.0, help="class-centre magnitude over unit noise (default: 1)")


def _add_dataset(parser):
    parser.add_argument("--manifest", type=str, default=None,
                        help="dataset manifest JSON, or a directory holding manifest.json")
    _add_synthetic(parser)


def _add_topology(parser):
    parser.add_argument("--threshold", type=int, default=None,
                        help="minimum number of supporting views in the cross-view vote (default: 2)")
    parser.add_argument("--keep-ties", action='store_true', default=False,
                        help="keep every tied nearest neighbour instead of the smallest index")
    parser.add_argument("--max-nnz", type=int, default=DEFAULT_MAX_NNZ,
                        help=f"abort sparse products storing more entries (default: {DEFAULT_MAX_NNZ})")


def get_argparser():
    parser = argparse.ArgumentParser(prog="run.py",
                                     description="Simple multigraph convolution: topology extraction, "
                                                 "propagation, training and parameter audits")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True

    # Topology extraction
    extract = sub.add_parser("extract", help="extract the edge- and subgraph-level credible topologies")
    _add_common(extract, "extract")
    _add_dataset(extract)
    _add_topology(extract)

    # Train Options
    train = sub.add_parser("train", help="propagate features and train a classifier")
    _add_common(train, "train")
    _add_dataset(train)
    _add_topology(train)
    train.add_argument("--method", type=str, default='smgcn', choices=methods.get_method_list(),
                       help="multigraph convolution (default: smgcn)")
    train.add_argument("--k", type=int, default=3,
                       help="polynomial order K (default: 3)")
    train.add_argument("--raw-operators", action='store_true', default=False,
                       help="skip symmetric normalization of A(v), E and S")
    train.add_argument("--symmetrize", action='store_true', default=False,
                       help="symmetrize each materialized term operator")
    train.add_argument("--dedupe", action='store_true', default=False,
                       help="collapse the duplicated (A(v))^K terms")
    train.add_argument("--hidden", type=int, default=128,
                       help="embedding dimension d1 (default: 128)")
    train.add_argument("--epochs", type=int, default=300,
                       help="epoch number (default: 300)")
    train.add_argument("--patience", type=int, default=50,
                       help="early-stopping patience on validation accuracy (default: 50)")
    train.add_argument("--lr", type=float_list, default=[0.1, 0.01, 0.001],
                       help="learning-rate grid (default: 0.1,0.01,0.001)")
    train.add_argument("--weight-decay", type=float_list, default=[0.0, 1e-5, 1e-4, 1e-3, 1e-2],
                       help="weight-decay grid (default: 0,1e-5,1e-4,1e-3,1e-2)")
    train.add_argument("--dump-embeddings", action='store_true', default=False,
                       help="write the node embeddings Z to embeddings.csv")
    train.add_argument("--dump-matrix", action='store_true', default=False,
                       help="write every materialized term operator to operators/")

    # Parameter audit
    params = sub.add_parser("params", help="tabulate term and parameter counts over an (m, K) grid")
    _add_common(params, "params")
    params.add_argument("--methods", type=str_list, default=['smgcn', 'mimo'],
                        help="comma-separated methods (default: smgcn,mimo)")
    params.add_argument("--m", type=int_list, default=[4], help="comma-separated view counts (default: 4)")
    params.add_argument("--k-max", type=int, default=6, help="largest polynomial order (default: 6)")
    params.add_argument("--d0", type=int, default=1902, help="input feature dimension (default: 1902)")
    params.add_argument("--d1", type=int, default=128, help="embedding dimension (default: 128)")
    params.add_argument("--classes", type=int, default=3, help="number of classes (default: 3)")
    params.add_argument("--dedupe", action='store_true', default=False,
                        help="count smgcn without the duplicated (A(v))^K terms")

    # Synthetic dataset
    synth = sub.add_parser("synth", help="write a planted-partition multigraph dataset")
    _add_common(synth, "synth")
    _add_synthetic(synth)

    # Evaluation
    evaluate = sub.add_parser("eval", help="score saved predictions")
    _add_common(evaluate, "eval")
    evaluate.add_argument("--predictions", type=str, required=True,
                          help="CSV with 'node,pred' rows as written by train")
    evaluate.add_argument("--manifest", type=str, default=None,
                          help="dataset whose labels and masks are used")
    evaluate.add_argument("--labels", type=str, default=None,
                          help="one label per line, instead of --manifest")
    evaluate.add_argument("--split", type=str, default='test', choices=['train', 'val', 'test', 'all'],
                          help="nodes to score when --manifest is given (default: test)")

    return parser
